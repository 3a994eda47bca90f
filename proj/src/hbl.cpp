#include "tileopt/hbl.hpp"

#include "tileopt/errors.hpp"
#include "tileopt/lp.hpp"
#include "scalar.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

namespace tileopt {

auto subset_less(const Subset &a, const Subset &b) -> bool {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

auto loop_exponents(const LoopNest &nest, std::uint64_t cache_words, Mode mode)
  -> std::vector<Number> {
  if (cache_words < 2)
    throw InputError("cache size must be at least 2 words (got " +
                     std::to_string(cache_words) + ")");
  std::vector<Number> out;
  out.reserve(nest.depth());
  const double log_m = std::log(static_cast<double>(cache_words));
  for (const auto &loop : nest.loops) {
    if (mode == Mode::Rational) {
      auto e = exact_log(loop.bound, cache_words);
      if (!e)
        throw InputError("rational mode: log_" + std::to_string(cache_words) +
                         "(" + std::to_string(loop.bound) + ") for loop '" +
                         loop.name + "' is irrational; use float mode");
      out.emplace_back(*e);
    } else {
      out.emplace_back(std::log(static_cast<double>(loop.bound)) / log_m);
    }
  }
  return out;
}

namespace {

using detail::from_scalar;
using detail::to_scalars;

struct Structure {
  std::size_t depth;
  std::vector<std::vector<std::size_t>> supports;   // per array
  std::vector<std::vector<std::size_t>> containing; // R_i per loop
};

auto structure_of(const LoopNest &nest) -> Structure {
  require_valid(nest);
  Structure s{nest.depth(), support_positions(nest), {}};
  s.containing.resize(nest.depth());
  for (std::size_t j = 0; j < s.supports.size(); ++j)
    for (auto i : s.supports[j])
      s.containing[i].push_back(j);
  return s;
}

auto membership(const Structure &s, const Subset &subset) -> std::vector<bool> {
  std::vector<bool> in(s.depth, false);
  for (auto i : subset) {
    if (i >= s.depth)
      throw InputError("subset names loop position " + std::to_string(i) +
                       " but the nest has " + std::to_string(s.depth) +
                       " loops");
    in[i] = true;
  }
  return in;
}

template <class T>
auto coverage(const Structure &s, const std::vector<T> &w, std::size_t loop)
  -> T {
  T c(0);
  for (auto j : s.containing[loop])
    c += w[j];
  return c;
}

template <class T>
void add_covering_rows(lp::Problem<T> &p, const Structure &s,
                       const std::vector<bool> &in_subset, std::size_t width) {
  for (std::size_t i = 0; i < s.depth; ++i) {
    if (in_subset[i])
      continue;
    std::vector<T> row(width, T(0));
    for (auto j : s.containing[i])
      row[j] = T(1);
    p.add_row(std::move(row), lp::Relation::GreaterEqual, T(1));
  }
}

template <class T>
auto solve_checked(const lp::Problem<T> &p, const char *what) -> lp::Solution<T> {
  auto sol = lp::solve(p);
  if (sol.status != lp::Status::Optimal)
    throw InternalError(std::string(what) + " LP is " + lp::to_string(sol.status) +
                        "; impossible for a valid nest");
  return sol;
}

template <class T>
auto min_sum_weights(const Structure &s, const std::vector<bool> &in_subset)
  -> std::vector<T> {
  const auto n = s.supports.size();
  lp::Problem<T> p;
  p.sense = lp::Sense::Minimize;
  p.objective.assign(n, T(1));
  add_covering_rows(p, s, in_subset, n);
  return solve_checked(p, "covering").primal;
}

template <class T>
auto sum(const std::vector<T> &v) -> T {
  T total(0);
  for (const auto &x : v)
    total += x;
  return total;
}

// Among minimum-sum covers, the one with the smallest slicing correction.
template <class T>
auto tightest_weights(const Structure &s, const std::vector<bool> &in_subset,
                      const std::vector<T> &beta) -> std::vector<T> {
  auto first = min_sum_weights<T>(s, in_subset);
  std::vector<std::size_t> small;
  for (std::size_t i = 0; i < s.depth; ++i)
    if (in_subset[i])
      small.push_back(i);
  if (small.empty())
    return first;

  const auto n = s.supports.size();
  const auto width = n + small.size();
  lp::Problem<T> p;
  p.sense = lp::Sense::Minimize;
  p.objective.assign(width, T(0));
  for (std::size_t a = 0; a < small.size(); ++a)
    p.objective[n + a] = beta[small[a]];
  add_covering_rows(p, s, in_subset, width);

  T budget = sum(first);
  if constexpr (std::is_floating_point_v<T>)
    budget += 1e-12 * std::max(T(1), budget);
  std::vector<T> total_row(width, T(0));
  std::fill_n(total_row.begin(), n, T(1));
  p.add_row(std::move(total_row), lp::Relation::LessEqual, budget);

  for (std::size_t a = 0; a < small.size(); ++a) {
    std::vector<T> row(width, T(0));
    for (auto j : s.containing[small[a]])
      row[j] = T(1);
    row[n + a] = T(1);
    p.add_row(std::move(row), lp::Relation::GreaterEqual, T(1));
  }
  auto x = solve_checked(p, "slicing tie-break").primal;
  x.resize(n);
  return x;
}

template <class T>
auto slicing_value(const Structure &s, const std::vector<bool> &in_subset,
                   const std::vector<T> &w, const std::vector<T> &beta) -> T {
  T k = sum(w);
  for (std::size_t j = 0; j < s.depth; ++j) {
    if (!in_subset[j])
      continue;
    // Only coverage at most 1 contributes; a float coverage a hair above 1
    // must not contribute a negative amount.
    T c = coverage(s, w, j);
    if (c < T(1))
      k += beta[j] * (T(1) - c);
  }
  return k;
}

template <class T>
auto make_clipped(const Subset &subset, const std::vector<T> &w)
  -> ClippedWeights {
  ClippedWeights out;
  out.subset = subset;
  for (const auto &x : w)
    out.weights.push_back(from_scalar(x));
  out.total = from_scalar(sum(w));
  return out;
}

auto normalized(Subset subset) -> Subset {
  std::sort(subset.begin(), subset.end());
  subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
  return subset;
}

auto subset_of_mask(std::uint64_t mask, std::size_t depth) -> Subset {
  Subset q;
  for (std::size_t i = 0; i < depth; ++i)
    if ((mask >> i) & 1U)
      q.push_back(i);
  return q;
}

template <class T>
struct Candidate {
  T k{};
  std::vector<T> weights;
};

template <class T>
auto evaluate_subsets(const Structure &s, const std::vector<T> &beta)
  -> std::vector<Candidate<T>> {
  const std::uint64_t count = std::uint64_t{1} << s.depth;
  std::vector<Candidate<T>> out(count);
  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t mask = begin; mask < end; ++mask) {
      auto in = membership(s, subset_of_mask(mask, s.depth));
      auto w = tightest_weights<T>(s, in, beta);
      out[mask].k = slicing_value(s, in, w, beta);
      out[mask].weights = std::move(w);
    }
  };
  const unsigned hw = std::max(1U, std::thread::hardware_concurrency());
  if (count < 256 || hw == 1) {
    work(0, count);
    return out;
  }
  const std::uint64_t chunk = (count + hw - 1) / hw;
  std::vector<std::exception_ptr> errors(hw);
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < hw; ++t) {
      auto b = std::min<std::uint64_t>(count, t * chunk);
      auto e = std::min<std::uint64_t>(count, b + chunk);
      if (b < e)
        pool.emplace_back([&, t, b, e] {
          try {
            work(b, e);
          } catch (...) {
            errors[t] = std::current_exception();
          }
        });
    }
  }
  for (const auto &err : errors)
    if (err)
      std::rethrow_exception(err);
  return out;
}

template <class T>
auto is_tie(const T &a, const T &b) -> bool {
  if constexpr (std::is_floating_point_v<T>)
    return std::abs(a - b) <= 1e-12 * std::max(T(1), std::abs(b));
  else
    return a == b;
}

template <class T>
void fill_bound(BoundReport &report, const Structure &s,
                const std::vector<T> &beta) {
  auto candidates = evaluate_subsets(s, beta);
  report.subsets_evaluated = candidates.size();
  std::uint64_t best = 0;
  Subset best_subset = subset_of_mask(0, s.depth);
  for (std::uint64_t mask = 1; mask < candidates.size(); ++mask) {
    const auto &c = candidates[mask];
    auto q = subset_of_mask(mask, s.depth);
    bool take = false;
    if (is_tie(c.k, candidates[best].k))
      take = subset_less(q, best_subset);
    else
      take = c.k < candidates[best].k;
    if (take) {
      best = mask;
      best_subset = std::move(q);
    }
  }
  report.k_hat = from_scalar(candidates[best].k);
  report.best = make_clipped(best_subset, candidates[best].weights);
}

void fill_counts(BoundReport &r, const LoopNest &nest) {
  const double log2_m = std::log2(static_cast<double>(r.cache_words));
  const double k = r.k_hat.value;
  double log2_volume = 0.0;
  double volume = 1.0;
  for (const auto &l : nest.loops) {
    log2_volume += std::log2(static_cast<double>(l.bound));
    volume *= static_cast<double>(l.bound);
  }
  r.log2_tile_bound = k * log2_m;
  r.log2_lower_bound = log2_volume + (1.0 - k) * log2_m;
  r.lower_bound_words =
    volume * std::pow(static_cast<double>(r.cache_words), 1.0 - k);

  constexpr double kRoundLimit = 9.0e18;
  auto tile = std::exp2(r.log2_tile_bound);
  if (tile < kRoundLimit)
    r.tile_bound = static_cast<std::uint64_t>(std::llround(tile));
  if (r.lower_bound_words < kRoundLimit)
    r.lower_bound_rounded =
      static_cast<std::uint64_t>(std::llround(r.lower_bound_words));

  if (!r.k_hat.exact)
    return;
  // Exact integer counts when every bound is a power of M's root.
  auto [base, power] = perfect_power(r.cache_words);
  Rational lb_exp = Rational(power) * (Rational(1) - *r.k_hat.exact);
  for (const auto &e : r.exponents)
    lb_exp += *e.exact * power;
  Rational tile_exp = Rational(power) * *r.k_hat.exact;
  auto exact_power = [&](const Rational &e) -> std::optional<std::string> {
    if (denominator(e) != 1 || e < 0 || e > 4096)
      return std::nullopt;
    BigInt v = boost::multiprecision::pow(BigInt(base),
                                          static_cast<unsigned>(numerator(e)));
    return v.str();
  };
  r.lower_bound_exact = exact_power(lb_exp);
  r.tile_bound_exact = exact_power(tile_exp);
  if (r.lower_bound_exact && denominator(lb_exp) == 1) {
    BigInt v(*r.lower_bound_exact);
    if (v < BigInt(kRoundLimit))
      r.lower_bound_rounded = v.convert_to<std::uint64_t>();
  }
  if (r.tile_bound_exact) {
    BigInt v(*r.tile_bound_exact);
    if (v < BigInt(kRoundLimit))
      r.tile_bound = v.convert_to<std::uint64_t>();
  }
}

template <class T>
auto hbl_impl(const Structure &s) -> HblSolution {
  auto w = min_sum_weights<T>(s, std::vector<bool>(s.depth, false));
  HblSolution out;
  out.k_hbl = from_scalar(sum(w));
  for (const auto &x : w)
    out.weights.push_back(from_scalar(x));
  return out;
}

auto hbl_for(const Structure &s, Mode mode) -> HblSolution {
  return mode == Mode::Rational ? hbl_impl<Rational>(s) : hbl_impl<double>(s);
}

} // namespace

auto solve_hbl(const LoopNest &nest, Mode mode) -> HblSolution {
  return hbl_for(structure_of(nest), mode);
}

auto solve_clipped_hbl(const LoopNest &nest, const Subset &subset, Mode mode)
  -> ClippedWeights {
  auto s = structure_of(nest);
  auto q = normalized(subset);
  auto in = membership(s, q);
  if (mode == Mode::Rational)
    return make_clipped(q, min_sum_weights<Rational>(s, in));
  return make_clipped(q, min_sum_weights<double>(s, in));
}

auto solve_clipped_hbl(const LoopNest &nest, const Subset &subset,
                       const std::vector<Number> &exponents, Mode mode)
  -> ClippedWeights {
  auto s = structure_of(nest);
  if (exponents.size() != s.depth)
    throw InputError("expected one loop exponent per loop");
  auto q = normalized(subset);
  auto in = membership(s, q);
  if (mode == Mode::Rational)
    return make_clipped(
      q, tightest_weights(s, in, to_scalars<Rational>(exponents)));
  return make_clipped(q, tightest_weights(s, in, to_scalars<double>(exponents)));
}

auto slicing_exponent(const LoopNest &nest, const Subset &subset,
                      const std::vector<Number> &weights,
                      const std::vector<Number> &exponents) -> Number {
  auto s = structure_of(nest);
  auto q = normalized(subset);
  auto in = membership(s, q);
  if (weights.size() != nest.num_arrays())
    throw InputError("expected one weight per array");
  if (exponents.size() != s.depth)
    throw InputError("expected one loop exponent per loop");

  auto run = [&]<class T>(std::vector<T> w, std::vector<T> beta) -> Number {
    for (const auto &x : w)
      if (is_negative(x))
        throw InputError("slicing weights must be nonnegative");
    for (std::size_t i = 0; i < s.depth; ++i)
      if (!in[i] && is_negative(T(coverage(s, w, i) - T(1))))
        throw InputError("weights do not cover loop '" + nest.loops[i].name +
                         "', which is not in the subset");
    return from_scalar(slicing_value(s, in, w, beta));
  };
  bool exact = std::all_of(weights.begin(), weights.end(),
                           [](const Number &x) { return x.is_exact(); }) &&
               std::all_of(exponents.begin(), exponents.end(),
                           [](const Number &x) { return x.is_exact(); });
  if (exact)
    return run(to_scalars<Rational>(weights), to_scalars<Rational>(exponents));
  return run(to_scalars<double>(weights), to_scalars<double>(exponents));
}

auto slicing_exponent(const LoopNest &nest, const Subset &subset,
                      const std::vector<Number> &weights,
                      std::uint64_t cache_words, Mode mode) -> Number {
  return slicing_exponent(nest, subset, weights,
                          loop_exponents(nest, cache_words, mode));
}

auto best_bound(const LoopNest &nest, std::uint64_t cache_words, Mode mode)
  -> BoundReport {
  auto s = structure_of(nest);
  if (s.depth > kMaxEnumerationDepth)
    throw LimitError(
      "best_bound enumerates 2^d subsets and is limited to d <= " +
      std::to_string(kMaxEnumerationDepth) + " (got d = " +
      std::to_string(s.depth) +
      "); the tiling LP value equals the bound, use 'certify' or 'tile'");
  BoundReport r;
  r.cache_words = cache_words;
  r.mode = mode;
  r.exponents = loop_exponents(nest, cache_words, mode);
  r.hbl = hbl_for(s, mode);
  if (mode == Mode::Rational)
    fill_bound(r, s, to_scalars<Rational>(r.exponents));
  else
    fill_bound(r, s, to_scalars<double>(r.exponents));
  fill_counts(r, nest);
  r.fits_in_cache = fits_in_cache(nest, cache_words);
  return r;
}

} // namespace tileopt
