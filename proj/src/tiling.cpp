#include "tileopt/tiling.hpp"

#include "scalar.hpp"
#include "tileopt/errors.hpp"
#include "tileopt/lp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tileopt {

namespace {

using detail::from_scalar;
using detail::to_scalars;

template <class T>
auto tiling_impl(const LoopNest &nest, const std::vector<T> &beta, const T &rhs)
  -> lp::Solution<T> {
  const auto d = nest.depth();
  auto supports = support_positions(nest);
  lp::Problem<T> p;
  p.sense = lp::Sense::Maximize;
  p.objective.assign(d, T(1));
  for (const auto &sup : supports) {
    std::vector<T> row(d, T(0));
    for (auto i : sup)
      row[i] = T(1);
    p.add_row(std::move(row), lp::Relation::LessEqual, rhs);
  }
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<T> row(d, T(0));
    row[i] = T(1);
    p.add_row(std::move(row), lp::Relation::LessEqual, beta[i]);
  }
  auto sol = lp::solve(p);
  if (sol.status != lp::Status::Optimal)
    throw InternalError(std::string("tiling LP is ") + lp::to_string(sol.status) +
                        "; lambda = 0 is always feasible");
  return sol;
}

template <class T>
void fill_solution(TilingSolution &out, const lp::Solution<T> &sol,
                   std::size_t arrays) {
  for (const auto &x : sol.primal)
    out.lambda.push_back(from_scalar(x));
  out.value = from_scalar(sol.objective);
  for (std::size_t r = 0; r < sol.dual.size(); ++r) {
    if (r < arrays)
      out.array_duals.push_back(from_scalar(sol.dual[r]));
    else
      out.bound_duals.push_back(from_scalar(sol.dual[r]));
  }
}

auto strict_rhs(std::size_t arrays, std::uint64_t cache_words, Mode mode)
  -> Number {
  if (mode == Mode::Rational) {
    auto e = exact_log(arrays, cache_words);
    if (!e)
      throw InputError("rational mode: log_M(n) is irrational for n = " +
                       std::to_string(arrays) + "; use float mode");
    Rational r = Rational(1) - *e;
    return r < 0 ? Rational(0) : r;
  }
  double r = 1.0 - std::log(static_cast<double>(arrays)) /
                     std::log(static_cast<double>(cache_words));
  return std::max(0.0, r);
}

auto footprints_of(const std::vector<std::vector<std::size_t>> &supports,
                   const std::vector<std::uint64_t> &dims)
  -> std::vector<std::uint64_t> {
  std::vector<std::uint64_t> out;
  for (const auto &sup : supports) {
    std::uint64_t f = 1;
    for (auto i : sup)
      f = saturating_mul(f, dims[i]);
    out.push_back(f);
  }
  return out;
}

auto realize(const LoopNest &nest, const std::vector<Number> &lambda,
             std::uint64_t cache_words, std::uint64_t budget) -> Tiling {
  require_valid(nest);
  if (lambda.size() != nest.depth())
    throw InputError("expected one exponent per loop");
  if (cache_words < 2)
    throw InputError("cache size must be at least 2 words");
  const double m = static_cast<double>(cache_words);
  std::vector<std::uint64_t> dims(nest.depth());
  std::vector<double> target(nest.depth());
  for (std::size_t i = 0; i < nest.depth(); ++i) {
    const auto bound = nest.loops[i].bound;
    target[i] = std::pow(m, std::max(0.0, lambda[i].value));
    if (lambda[i].exact) {
      BigInt b = floor_power(cache_words, *lambda[i].exact);
      dims[i] = b >= BigInt(bound) ? bound : b.convert_to<std::uint64_t>();
    } else {
      double b = std::floor(target[i] * (1.0 + 1e-12));
      dims[i] = b >= static_cast<double>(bound)
                  ? bound
                  : static_cast<std::uint64_t>(std::max(1.0, b));
    }
    dims[i] = std::clamp<std::uint64_t>(dims[i], 1, bound);
  }

  // Float exponents can land a hair above a footprint budget; shrink the
  // dimension that overshoots its real target the most.
  auto supports = support_positions(nest);
  for (;;) {
    auto fp = footprints_of(supports, dims);
    auto over = std::find_if(fp.begin(), fp.end(),
                             [&](std::uint64_t f) { return f > budget; });
    if (over == fp.end())
      break;
    const auto &sup = supports[static_cast<std::size_t>(over - fp.begin())];
    std::size_t pick = npos;
    double worst = 0.0;
    for (auto i : sup) {
      if (dims[i] <= 1)
        continue;
      double ratio = static_cast<double>(dims[i]) / target[i];
      if (pick == npos || ratio > worst) {
        pick = i;
        worst = ratio;
      }
    }
    if (pick == npos)
      throw InputError("no tile fits: footprint budget " +
                       std::to_string(budget) + " is below 1 word");
    --dims[pick];
  }

  auto t = make_tiling(nest, std::move(dims));
  t.lambda = lambda;
  return t;
}

} // namespace

auto solve_tiling_lp(const LoopNest &nest, std::uint64_t cache_words,
                     const TilingOptions &options) -> TilingSolution {
  require_valid(nest);
  TilingSolution out;
  out.cache_words = cache_words;
  out.exponents = loop_exponents(nest, cache_words, options.mode);
  out.array_rhs = options.strict_footprint
                    ? strict_rhs(nest.num_arrays(), cache_words, options.mode)
                    : Number(1);
  if (options.mode == Mode::Rational) {
    auto sol = tiling_impl(nest, to_scalars<Rational>(out.exponents),
                           detail::to_scalar<Rational>(out.array_rhs));
    fill_solution(out, sol, nest.num_arrays());
  } else {
    auto sol = tiling_impl(nest, to_scalars<double>(out.exponents),
                           out.array_rhs.value);
    fill_solution(out, sol, nest.num_arrays());
  }
  return out;
}

auto realize_tile(const LoopNest &nest, const std::vector<Number> &lambda,
                  std::uint64_t cache_words) -> Tiling {
  return realize(nest, lambda, cache_words, cache_words);
}

auto realize_tile(const LoopNest &nest, const TilingSolution &solution,
                  bool strict_footprint) -> Tiling {
  const auto m = solution.cache_words;
  const auto budget = strict_footprint ? m / nest.num_arrays() : m;
  return realize(nest, solution.lambda, m, budget);
}

auto make_tiling(const LoopNest &nest, std::vector<std::uint64_t> dims)
  -> Tiling {
  if (dims.size() != nest.depth())
    throw InputError("expected " + std::to_string(nest.depth()) +
                     " tile dimensions, got " + std::to_string(dims.size()));
  Tiling t;
  t.volume = 1;
  for (auto b : dims)
    t.volume *= b;
  t.footprints = footprints_of(support_positions(nest), dims);
  t.dims = std::move(dims);
  return t;
}

auto tiling_violations(const LoopNest &nest,
                       const std::vector<std::uint64_t> &dims,
                       std::uint64_t cache_words) -> std::vector<std::string> {
  std::vector<std::string> out;
  if (dims.size() != nest.depth()) {
    out.push_back("expected " + std::to_string(nest.depth()) +
                  " tile dimensions, got " + std::to_string(dims.size()));
    return out;
  }
  for (std::size_t i = 0; i < dims.size(); ++i)
    if (dims[i] < 1 || dims[i] > nest.loops[i].bound)
      out.push_back("tile dimension for '" + nest.loops[i].name + "' is " +
                    std::to_string(dims[i]) + ", outside [1, " +
                    std::to_string(nest.loops[i].bound) + "]");
  auto fp = footprints_of(support_positions(nest), dims);
  for (std::size_t j = 0; j < fp.size(); ++j)
    if (fp[j] > cache_words)
      out.push_back("footprint of array '" + nest.arrays[j].name + "' is " +
                    std::to_string(fp[j]) + " words, above M = " +
                    std::to_string(cache_words));
  return out;
}

auto duality_certificate(const LoopNest &nest, std::uint64_t cache_words,
                         Mode mode) -> DualityCertificate {
  auto lp = solve_tiling_lp(nest, cache_words, {mode, false});
  DualityCertificate c;
  c.lp_value = lp.value;
  c.array_duals = lp.array_duals;
  c.bound_duals = lp.bound_duals;

  // Dual objective and feasibility: zeta_i + sum_{j in R_i} s_j >= 1.
  auto supports = support_positions(nest);
  const bool exact = mode == Mode::Rational;
  Rational dual_exact(0);
  double dual = 0.0;
  for (std::size_t j = 0; j < lp.array_duals.size(); ++j) {
    dual += lp.array_duals[j].value;
    if (exact)
      dual_exact += *lp.array_duals[j].exact;
    c.dual_infeasibility = std::max(c.dual_infeasibility, -lp.array_duals[j].value);
  }
  for (std::size_t i = 0; i < lp.bound_duals.size(); ++i) {
    dual += lp.exponents[i].value * lp.bound_duals[i].value;
    if (exact)
      dual_exact += *lp.exponents[i].exact * *lp.bound_duals[i].exact;
    double cover = lp.bound_duals[i].value;
    for (std::size_t j = 0; j < supports.size(); ++j)
      if (std::find(supports[j].begin(), supports[j].end(), i) != supports[j].end())
        cover += lp.array_duals[j].value;
    c.dual_infeasibility = std::max(
      {c.dual_infeasibility, 1.0 - cover, -lp.bound_duals[i].value});
  }
  c.dual_value = exact ? Number(dual_exact) : Number(dual);

  if (nest.depth() <= kMaxEnumerationDepth) {
    auto bound = best_bound(nest, cache_words, mode);
    c.k_hat = bound.k_hat;
    c.subset = bound.best.subset;
    c.enumerated = true;
  } else {
    c.k_hat = c.dual_value;
  }
  if (exact) {
    Rational diff = *c.lp_value.exact - *c.k_hat.exact;
    c.gap = std::abs(to_double(diff));
    c.valid = diff == 0 && *c.lp_value.exact == *c.dual_value.exact &&
              c.dual_infeasibility <= 0.0;
  } else {
    c.gap = std::abs(c.lp_value.value - c.k_hat.value);
    c.valid = c.gap <= kTolerance &&
              std::abs(c.lp_value.value - c.dual_value.value) <= kTolerance &&
              c.dual_infeasibility <= kTolerance;
  }
  return c;
}

auto emit_tiled_loops(const LoopNest &nest, const Tiling &tiling) -> std::string {
  require_valid(nest);
  const auto d = nest.depth();
  if (tiling.dims.size() != d)
    throw InputError("tiling does not match the nest depth");
  for (std::size_t i = 0; i < d; ++i)
    if (tiling.dims[i] < 1 || tiling.dims[i] > nest.loops[i].bound)
      throw InputError("tile dimension out of range for '" +
                       nest.loops[i].name + "'");

  std::ostringstream os;
  os << "# tiled " << nest.name << " tile";
  for (std::size_t i = 0; i < d; ++i)
    os << (i ? " x " : " ") << tiling.dims[i];
  os << '\n';
  std::string indent;
  for (std::size_t i = 0; i < d; ++i) {
    const auto &x = nest.loops[i].name;
    os << indent << "for o_" << x << " in range(0, "
       << ceil_div(nest.loops[i].bound, tiling.dims[i]) << "):\n";
    indent += "  ";
  }
  for (std::size_t i = 0; i < d; ++i) {
    const auto &x = nest.loops[i].name;
    const auto b = tiling.dims[i];
    os << indent << "for t_" << x << " in range(0, min(" << b << ", "
       << nest.loops[i].bound << " - " << b << "*o_" << x << ")):\n";
    indent += "  ";
  }
  for (std::size_t i = 0; i < d; ++i) {
    const auto &x = nest.loops[i].name;
    os << indent << x << " = " << tiling.dims[i] << "*o_" << x << " + t_" << x
       << '\n';
  }
  for (const auto &a : nest.arrays) {
    os << indent << "use " << a.name << '[';
    for (std::size_t k = 0; k < a.support.size(); ++k)
      os << (k ? ", " : "") << a.support[k];
    os << "]\n";
  }
  return os.str();
}

} // namespace tileopt
