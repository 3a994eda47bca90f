#pragma once

#include "tileopt/model.hpp"
#include "tileopt/numeric.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tileopt {

/// Sorted loop positions treated as "small" (held fixed while slicing).
using Subset = std::vector<std::size_t>;

/// Lexicographic order on sorted position lists; used for tie-breaking.
auto subset_less(const Subset &a, const Subset &b) -> bool;

/// beta_i = log_M L_i per loop. In rational mode every beta must be an
/// exact rational (L_i and M powers of a common integer), otherwise
/// InputError. Throws InputError when M < 2.
auto loop_exponents(const LoopNest &nest, std::uint64_t cache_words, Mode mode)
  -> std::vector<Number>;

struct HblSolution {
  Number k_hbl;
  std::vector<Number> weights; // s_j per array
};

/// min sum s_j  s.t.  sum_{j : i in supp_j} s_j >= 1 for every loop i.
auto solve_hbl(const LoopNest &nest, Mode mode = Mode::Float) -> HblSolution;

/// HBL weights with the covering rows of the loops in `subset` removed.
struct ClippedWeights {
  Subset subset;
  std::vector<Number> weights;
  Number total;
};

/// Minimal-sum weights for the clipped covering LP (one deterministic
/// optimal vertex).
auto solve_clipped_hbl(const LoopNest &nest, const Subset &subset,
                       Mode mode = Mode::Float) -> ClippedWeights;

/// As above, but among all minimal-sum weight vectors returns one that
/// minimizes the slicing exponent for the given loop exponents. This is the
/// selection used by best_bound.
auto solve_clipped_hbl(const LoopNest &nest, const Subset &subset,
                       const std::vector<Number> &exponents, Mode mode)
  -> ClippedWeights;

/// k = sum_i w_i + sum_{j in subset, c_j <= 1} beta_j (1 - c_j), where
/// c_j = sum of the weights of the arrays whose support contains loop j.
/// Throws InputError for M < 2 or weights infeasible for the subset.
auto slicing_exponent(const LoopNest &nest, const Subset &subset,
                      const std::vector<Number> &weights,
                      std::uint64_t cache_words, Mode mode = Mode::Float)
  -> Number;

/// Same, with precomputed loop exponents.
auto slicing_exponent(const LoopNest &nest, const Subset &subset,
                      const std::vector<Number> &weights,
                      const std::vector<Number> &exponents) -> Number;

struct BoundReport {
  std::uint64_t cache_words{0};
  Mode mode{Mode::Float};
  std::vector<Number> exponents; // beta
  HblSolution hbl;
  Number k_hat;
  ClippedWeights best; // Q* and its weights
  std::size_t subsets_evaluated{0};

  /// M^k_hat: largest possible tile volume.
  double log2_tile_bound{0.0};
  std::optional<std::uint64_t> tile_bound; // rounded, when representable
  std::optional<std::string> tile_bound_exact;

  /// prod L_i * M^(1 - k_hat) words, no constant factor.
  double log2_lower_bound{0.0};
  double lower_bound_words{0.0};
  std::optional<std::uint64_t> lower_bound_rounded;
  std::optional<std::string> lower_bound_exact;

  /// Every array fits in cache on its own; the leading term then degenerates
  /// to M rather than the true cost (the sum of the array sizes).
  bool fits_in_cache{false};
};

inline constexpr std::size_t kMaxEnumerationDepth = 20;

/// Minimum slicing exponent over all 2^d subsets. Ties within 1e-12 go to
/// the lexicographically smallest subset. Independent subsets may be
/// evaluated concurrently; the result is identical to a sequential run.
auto best_bound(const LoopNest &nest, std::uint64_t cache_words,
                Mode mode = Mode::Float) -> BoundReport;

} // namespace tileopt
