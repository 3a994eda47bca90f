#pragma once

#include "tileopt/model.hpp"
#include "tileopt/tiling.hpp"

#include <cstdint>
#include <vector>

namespace tileopt {

enum class OracleMode { Rectangle, Subset };

struct OracleResult {
  OracleMode mode{OracleMode::Rectangle};
  std::uint64_t volume{0};
  /// Rectangle mode: the maximizing b_1..b_d.
  std::vector<std::uint64_t> dims;
  /// Subset mode: the maximizing point set (0-based coordinates).
  std::vector<std::vector<std::uint64_t>> points;
  /// Rectangle mode: number of candidate rectangles, prod min(L_i, M).
  /// Subset mode: number of grid points (the subset space is 2^that).
  std::uint64_t search_space{0};
  /// False when the subset search fell back to the heuristic.
  bool exact{true};
};

inline constexpr std::uint64_t kDefaultRectangleCap = 100'000'000;
inline constexpr std::uint64_t kDefaultSubsetExactCap = 24;
inline constexpr std::uint64_t kSubsetHeuristicCap = 4096;

/// Exact maximum of prod b_i over 1 <= b_i <= min(L_i, M) with every
/// per-array footprint <= M. The witness is the lexicographically smallest
/// maximizer. Throws LimitError when the candidate count exceeds `cap`.
auto brute_force_rect(const LoopNest &nest, std::uint64_t cache_words,
                      std::uint64_t cap = kDefaultRectangleCap) -> OracleResult;

/// Maximum |S| over arbitrary S in [L_1] x ... x [L_d] with every
/// projection |phi_j(S)| <= M. Exact by branch and bound when the grid has
/// at most `exact_cap` points; otherwise a greedy search whose result is
/// flagged `exact = false`. Throws LimitError beyond kSubsetHeuristicCap
/// points.
auto brute_force_subset(const LoopNest &nest, std::uint64_t cache_words,
                        std::uint64_t exact_cap = kDefaultSubsetExactCap)
  -> OracleResult;

struct RectangleCheck {
  bool rectangle_optimal{false};
  OracleResult rectangle;
  OracleResult subset;
};

/// Whether the best arbitrary tile is no larger than the best rectangle.
/// Requires the exact subset search (LimitError otherwise).
auto check_rectangle_optimality(const LoopNest &nest, std::uint64_t cache_words,
                                std::uint64_t rect_cap = kDefaultRectangleCap,
                                std::uint64_t subset_cap = kDefaultSubsetExactCap)
  -> RectangleCheck;

/// The exact rectangle optimum against the tiling LP: the optimum volume
/// must not exceed M^(LP value), and the realized LP tile must be within a
/// factor 2^d of the optimum.
struct RectVerification {
  OracleResult rectangle;
  Number lp_value;
  double log2_lp_volume{0.0}; // LP value * log2 M
  Tiling realized;
  bool upper_bound_holds{false};
  bool realized_within_factor{false};
};

auto verify_rectangle(const LoopNest &nest, std::uint64_t cache_words,
                      std::uint64_t cap = kDefaultRectangleCap,
                      Mode mode = Mode::Float) -> RectVerification;

/// |phi_j(S)| for every array.
auto subset_footprints(const LoopNest &nest,
                       const std::vector<std::vector<std::uint64_t>> &points)
  -> std::vector<std::uint64_t>;

} // namespace tileopt
