#include "tileopt/oracle.hpp"

#include "tileopt/errors.hpp"
#include "tileopt/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

namespace tileopt {

namespace {

struct RectSearch {
  const std::vector<std::vector<std::size_t>> &containing; // arrays per loop
  std::vector<std::uint64_t> limit;
  std::uint64_t cache;
  std::vector<std::uint64_t> partial; // footprint so far per array
  std::vector<std::uint64_t> dims;
  std::vector<std::uint64_t> suffix_volume; // prod limit[i..]
  std::uint64_t best{0};
  std::vector<std::uint64_t> best_dims;

  void run(std::size_t loop, std::uint64_t volume) {
    const auto d = limit.size();
    if (loop == d) {
      if (volume > best) {
        best = volume;
        best_dims = dims;
      }
      return;
    }
    // Nothing below this prefix can beat the incumbent (ties keep the
    // lexicographically smaller incumbent).
    if (saturating_mul(volume, suffix_volume[loop]) <= best)
      return;
    std::uint64_t hi = limit[loop];
    for (auto j : containing[loop])
      hi = std::min(hi, cache / partial[j]);
    if (loop + 1 == d) {
      // Volume is increasing in the last dimension: only the largest
      // feasible value can be a maximizer.
      dims[loop] = hi;
      run(loop + 1, volume * hi);
      return;
    }
    for (std::uint64_t b = 1; b <= hi; ++b) {
      for (auto j : containing[loop])
        partial[j] *= b;
      dims[loop] = b;
      run(loop + 1, volume * b);
      for (auto j : containing[loop])
        partial[j] /= b;
    }
  }
};

auto containing_of(const LoopNest &nest) -> std::vector<std::vector<std::size_t>> {
  std::vector<std::vector<std::size_t>> out(nest.depth());
  for (std::size_t i = 0; i < nest.depth(); ++i)
    out[i] = arrays_containing(nest, i);
  return out;
}

auto grid_points(const LoopNest &nest) -> std::vector<std::vector<std::uint64_t>> {
  std::vector<std::vector<std::uint64_t>> pts;
  std::vector<std::uint64_t> x(nest.depth(), 0);
  for (;;) {
    pts.push_back(x);
    std::size_t i = nest.depth();
    while (i > 0) {
      --i;
      if (++x[i] < nest.loops[i].bound)
        break;
      x[i] = 0;
      if (i == 0)
        return pts;
    }
  }
}

// Mixed-radix id of each point's projection, per array.
auto projection_keys(const LoopNest &nest,
                     const std::vector<std::vector<std::uint64_t>> &points)
  -> std::vector<std::vector<std::uint64_t>> {
  auto supports = support_positions(nest);
  std::vector<std::vector<std::uint64_t>> keys(supports.size(),
                                               std::vector<std::uint64_t>(points.size()));
  for (std::size_t j = 0; j < supports.size(); ++j) {
    for (std::size_t p = 0; p < points.size(); ++p) {
      std::uint64_t k = 0;
      for (auto i : supports[j])
        k = k * nest.loops[i].bound + points[p][i];
      keys[j][p] = k;
    }
  }
  return keys;
}

struct SubsetSearch {
  const std::vector<std::vector<std::uint64_t>> &keys;
  std::uint64_t cache;
  std::size_t points;
  std::vector<std::vector<std::uint32_t>> count; // per array, per key
  std::vector<std::uint64_t> distinct;
  std::vector<std::size_t> chosen;
  std::size_t best{0};
  std::vector<std::size_t> best_set;

  auto can_add(std::size_t p) const -> bool {
    for (std::size_t j = 0; j < keys.size(); ++j)
      if (count[j][keys[j][p]] == 0 && distinct[j] + 1 > cache)
        return false;
    return true;
  }
  void add(std::size_t p) {
    for (std::size_t j = 0; j < keys.size(); ++j)
      if (count[j][keys[j][p]]++ == 0)
        ++distinct[j];
    chosen.push_back(p);
  }
  void remove(std::size_t p) {
    for (std::size_t j = 0; j < keys.size(); ++j)
      if (--count[j][keys[j][p]] == 0)
        --distinct[j];
    chosen.pop_back();
  }

  void run(std::size_t p) {
    if (chosen.size() > best) {
      best = chosen.size();
      best_set = chosen;
    }
    if (p == points || chosen.size() + (points - p) <= best)
      return;
    if (can_add(p)) {
      add(p);
      run(p + 1);
      remove(p);
    }
    run(p + 1);
  }
};

auto heuristic_subset(const std::vector<std::vector<std::uint64_t>> &keys,
                      std::uint64_t cache, std::size_t points, std::size_t key_space)
  -> std::vector<std::size_t> {
  std::mt19937_64 rng(0x5eed);
  std::vector<std::size_t> order(points);
  std::vector<std::size_t> best;
  for (int restart = 0; restart < 32; ++restart) {
    for (std::size_t p = 0; p < points; ++p)
      order[p] = p;
    if (restart > 0)
      std::shuffle(order.begin(), order.end(), rng);
    SubsetSearch s{keys, cache, points,
                   std::vector<std::vector<std::uint32_t>>(
                     keys.size(), std::vector<std::uint32_t>(key_space, 0)),
                   std::vector<std::uint64_t>(keys.size(), 0), {}, 0, {}};
    for (auto p : order)
      if (s.can_add(p))
        s.add(p);
    if (s.chosen.size() > best.size())
      best = s.chosen;
  }
  std::sort(best.begin(), best.end());
  return best;
}

} // namespace

auto brute_force_rect(const LoopNest &nest, std::uint64_t cache_words,
                      std::uint64_t cap) -> OracleResult {
  require_valid(nest);
  if (cache_words < 1)
    throw InputError("cache size must be at least 1 word");
  const auto d = nest.depth();
  std::vector<std::uint64_t> limit(d);
  std::uint64_t space = 1;
  for (std::size_t i = 0; i < d; ++i) {
    limit[i] = std::min(nest.loops[i].bound, cache_words);
    space = saturating_mul(space, limit[i]);
  }
  if (space > cap)
    throw LimitError("rectangle search space " + std::to_string(space) +
                     " exceeds cap " + std::to_string(cap));

  auto containing = containing_of(nest);
  RectSearch s{containing, limit, cache_words,
               std::vector<std::uint64_t>(nest.num_arrays(), 1),
               std::vector<std::uint64_t>(d, 1), std::vector<std::uint64_t>(d + 1, 1),
               0, {}};
  for (std::size_t i = d; i > 0; --i)
    s.suffix_volume[i - 1] = saturating_mul(s.suffix_volume[i], limit[i - 1]);
  s.run(0, 1);

  OracleResult r;
  r.mode = OracleMode::Rectangle;
  r.volume = s.best;
  r.dims = s.best_dims;
  r.search_space = space;
  return r;
}

auto brute_force_subset(const LoopNest &nest, std::uint64_t cache_words,
                        std::uint64_t exact_cap) -> OracleResult {
  require_valid(nest);
  std::uint64_t grid = 1;
  for (const auto &l : nest.loops)
    grid = saturating_mul(grid, l.bound);
  if (grid > kSubsetHeuristicCap)
    throw LimitError("subset search over " + std::to_string(grid) +
                     " grid points exceeds cap " +
                     std::to_string(kSubsetHeuristicCap));

  auto pts = grid_points(nest);
  auto keys = projection_keys(nest, pts);
  std::size_t key_space = 1;
  for (const auto &row : keys)
    for (auto k : row)
      key_space = std::max<std::size_t>(key_space, k + 1);

  OracleResult r;
  r.mode = OracleMode::Subset;
  r.search_space = grid;
  std::vector<std::size_t> chosen;
  if (grid <= exact_cap) {
    SubsetSearch s{keys, cache_words, pts.size(),
                   std::vector<std::vector<std::uint32_t>>(
                     keys.size(), std::vector<std::uint32_t>(key_space, 0)),
                   std::vector<std::uint64_t>(keys.size(), 0), {}, 0, {}};
    s.run(0);
    chosen = s.best_set;
    r.exact = true;
  } else {
    chosen = heuristic_subset(keys, cache_words, pts.size(), key_space);
    r.exact = false;
  }
  r.volume = chosen.size();
  for (auto p : chosen)
    r.points.push_back(pts[p]);
  return r;
}

auto check_rectangle_optimality(const LoopNest &nest, std::uint64_t cache_words,
                                std::uint64_t rect_cap, std::uint64_t subset_cap)
  -> RectangleCheck {
  RectangleCheck c;
  c.subset = brute_force_subset(nest, cache_words, subset_cap);
  if (!c.subset.exact)
    throw LimitError("rectangle optimality needs the exact subset search; grid "
                     "has " + std::to_string(c.subset.search_space) +
                     " points, exact cap is " + std::to_string(subset_cap));
  c.rectangle = brute_force_rect(nest, cache_words, rect_cap);
  c.rectangle_optimal = c.subset.volume == c.rectangle.volume;
  return c;
}

auto subset_footprints(const LoopNest &nest,
                       const std::vector<std::vector<std::uint64_t>> &points)
  -> std::vector<std::uint64_t> {
  auto keys = projection_keys(nest, points);
  std::vector<std::uint64_t> out;
  for (const auto &row : keys) {
    std::unordered_set<std::uint64_t> seen(row.begin(), row.end());
    out.push_back(seen.size());
  }
  return out;
}

auto verify_rectangle(const LoopNest &nest, std::uint64_t cache_words,
                      std::uint64_t cap, Mode mode) -> RectVerification {
  RectVerification v;
  v.rectangle = brute_force_rect(nest, cache_words, cap);
  auto lp = solve_tiling_lp(nest, cache_words, {mode, false});
  v.lp_value = lp.value;
  v.log2_lp_volume = lp.value.value * std::log2(static_cast<double>(cache_words));
  v.realized = realize_tile(nest, lp.lambda, cache_words);

  // volume <= M^value, compared exactly when the value is rational.
  if (lp.value.exact) {
    const auto &k = *lp.value.exact;
    auto p = static_cast<unsigned>(numerator(k));
    auto q = static_cast<unsigned>(denominator(k));
    v.upper_bound_holds =
      boost::multiprecision::pow(BigInt(v.rectangle.volume), q) <=
      boost::multiprecision::pow(BigInt(cache_words), p);
  } else {
    v.upper_bound_holds =
      std::log2(static_cast<double>(v.rectangle.volume)) <=
      v.log2_lp_volume + kTolerance;
  }
  BigInt scaled = v.realized.volume << nest.depth();
  v.realized_within_factor = scaled >= BigInt(v.rectangle.volume);
  return v;
}

} // namespace tileopt
