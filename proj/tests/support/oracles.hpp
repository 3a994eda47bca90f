#pragma once

// Independent reference computations used only by the tests. None of these
// share code with the library beyond the model types.

#include "tileopt/lp.hpp"
#include "tileopt/model.hpp"
#include "tileopt/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace testsupport {

using tileopt::BigInt;
using tileopt::LoopNest;
using tileopt::Rational;

/// A random valid projective nest. Bounds are log-uniform in [1, max_bound].
inline auto random_nest(std::mt19937_64 &rng, std::size_t max_d, std::size_t max_n,
                        std::uint64_t max_bound) -> LoopNest {
  std::uniform_int_distribution<std::size_t> dd(1, max_d), nd(1, max_n);
  auto d = dd(rng);
  auto n = nd(rng);
  LoopNest nest;
  nest.name = "random";
  std::uniform_real_distribution<double> logb(0.0, std::log2(double(max_bound)));
  for (std::size_t i = 0; i < d; ++i) {
    auto b = static_cast<std::uint64_t>(std::floor(std::exp2(logb(rng))));
    nest.loops.push_back({"x" + std::to_string(i + 1),
                          std::clamp<std::uint64_t>(b, 1, max_bound)});
  }
  std::vector<std::vector<bool>> member(n, std::vector<bool>(d, false));
  std::bernoulli_distribution coin(0.45);
  std::uniform_int_distribution<std::size_t> pick_loop(0, d - 1), pick_array(0, n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < d; ++i)
      member[j][i] = coin(rng);
    member[j][pick_loop(rng)] = true;
  }
  for (std::size_t i = 0; i < d; ++i) {
    bool covered = false;
    for (std::size_t j = 0; j < n; ++j)
      covered = covered || member[j][i];
    if (!covered)
      member[pick_array(rng)][i] = true;
  }
  for (std::size_t j = 0; j < n; ++j) {
    tileopt::ArrayAccess a{"A" + std::to_string(j + 1), {}};
    for (std::size_t i = 0; i < d; ++i)
      if (member[j][i])
        a.support.push_back(nest.loops[i].name);
    nest.arrays.push_back(a);
  }
  return nest;
}

/// Solves A x = b exactly; nullopt when singular.
inline auto solve_square(std::vector<std::vector<Rational>> a, std::vector<Rational> b)
  -> std::optional<std::vector<Rational>> {
  const auto n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c] == 0)
      ++p;
    if (p == n)
      return std::nullopt;
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0)
        continue;
      Rational f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k)
        a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<Rational> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = b[i] / a[i][i];
  return x;
}

/// Optimum of a bounded LP by enumerating every basic solution: each choice
/// of `nvars` tight constraints (rows or variable bounds). Only for tiny
/// problems. Returns nullopt when infeasible.
inline auto vertex_optimum(const tileopt::lp::Problem<Rational> &p)
  -> std::optional<Rational> {
  using tileopt::lp::Relation;
  const auto nv = p.num_variables();
  std::vector<std::vector<Rational>> rows = p.rows;
  std::vector<Rational> rhs = p.rhs;
  for (std::size_t i = 0; i < nv; ++i) {
    std::vector<Rational> e(nv, 0);
    e[i] = 1;
    rows.push_back(e);
    rhs.push_back(p.lower_bounds.empty() ? Rational(0) : p.lower_bounds[i]);
  }
  auto feasible = [&](const std::vector<Rational> &x) {
    for (std::size_t r = 0; r < p.num_constraints(); ++r) {
      Rational v = 0;
      for (std::size_t i = 0; i < nv; ++i)
        v += p.rows[r][i] * x[i];
      if (p.relations[r] == Relation::LessEqual ? v > p.rhs[r] : v < p.rhs[r])
        return false;
    }
    for (std::size_t i = 0; i < nv; ++i)
      if (x[i] < (p.lower_bounds.empty() ? Rational(0) : p.lower_bounds[i]))
        return false;
    return true;
  };
  std::optional<Rational> best;
  const auto total = rows.size();
  // Iterate over combinations of nv rows out of total.
  std::vector<bool> mask(total, false);
  std::fill(mask.begin(), mask.begin() + static_cast<long>(std::min(nv, total)), true);
  do {
    std::vector<std::vector<Rational>> a;
    std::vector<Rational> b;
    for (std::size_t r = 0; r < total; ++r)
      if (mask[r]) {
        a.push_back(rows[r]);
        b.push_back(rhs[r]);
      }
    auto x = solve_square(a, b);
    if (!x || !feasible(*x))
      continue;
    Rational obj = 0;
    for (std::size_t i = 0; i < nv; ++i)
      obj += p.objective[i] * (*x)[i];
    bool better = !best || (p.sense == tileopt::lp::Sense::Maximize ? obj > *best
                                                                    : obj < *best);
    if (better)
      best = obj;
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return best;
}

struct RectOptimum {
  std::uint64_t volume{0};
  std::vector<std::uint64_t> dims;
};

/// Every rectangle in [1, min(L_i, M)]^d, no pruning.
inline auto naive_rect(const LoopNest &nest, std::uint64_t m) -> RectOptimum {
  const auto d = nest.depth();
  auto supports = tileopt::support_positions(nest);
  std::vector<std::uint64_t> hi(d), b(d, 1);
  for (std::size_t i = 0; i < d; ++i)
    hi[i] = std::min(nest.loops[i].bound, m);
  RectOptimum best;
  for (;;) {
    bool ok = true;
    for (const auto &s : supports) {
      std::uint64_t f = 1;
      for (auto i : s)
        f *= b[i];
      ok = ok && f <= m;
    }
    if (ok) {
      std::uint64_t v = 1;
      for (auto x : b)
        v *= x;
      if (v > best.volume) {
        best.volume = v;
        best.dims = b;
      }
    }
    std::size_t i = d;
    while (i > 0) {
      --i;
      if (++b[i] <= hi[i])
        break;
      b[i] = 1;
      if (i == 0)
        return best;
    }
  }
}

/// Words moved by visiting every tile one at a time.
inline auto enumerate_tile_words(const LoopNest &nest,
                                 const std::vector<std::uint64_t> &dims)
  -> std::pair<std::uint64_t, std::uint64_t> {
  const auto d = nest.depth();
  auto supports = tileopt::support_positions(nest);
  std::vector<std::uint64_t> trips(d), o(d, 0);
  for (std::size_t i = 0; i < d; ++i)
    trips[i] = (nest.loops[i].bound + dims[i] - 1) / dims[i];
  std::uint64_t tiles = 0, words = 0;
  for (;;) {
    ++tiles;
    for (const auto &s : supports) {
      std::uint64_t f = 1;
      for (auto i : s)
        f *= std::min(dims[i], nest.loops[i].bound - dims[i] * o[i]);
      words += f;
    }
    std::size_t i = d;
    while (i > 0) {
      --i;
      if (++o[i] < trips[i])
        break;
      o[i] = 0;
      if (i == 0)
        return {tiles, words};
    }
  }
}

/// max(L1 L2 L3 / sqrt(M), L1 L2, L2 L3, L1 L3)
inline auto matmul_lower_bound(double l1, double l2, double l3, double m) -> double {
  return std::max({l1 * l2 * l3 / std::sqrt(m), l1 * l2, l2 * l3, l1 * l3});
}

/// min(M^2, L1 M, L2 M, L1 L2)
inline auto nbody_tile_bound(double l1, double l2, double m) -> double {
  return std::min({m * m, l1 * m, l2 * m, l1 * l2});
}

} // namespace testsupport
