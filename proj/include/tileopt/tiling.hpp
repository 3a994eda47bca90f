#pragma once

#include "tileopt/hbl.hpp"
#include "tileopt/model.hpp"
#include "tileopt/numeric.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tileopt {

struct TilingOptions {
  Mode mode{Mode::Float};
  /// Budget M words for the SUM of a tile's footprints rather than per array:
  /// the array rows get right-hand side log_M(M/n) instead of 1.
  bool strict_footprint{false};
};

/// max sum lambda_i  s.t.  sum_{i in supp_j} lambda_i <= rhs   (every array)
///                         lambda_i <= beta_i                  (every loop)
///                         lambda >= 0
struct TilingSolution {
  std::vector<Number> exponents; // beta
  std::vector<Number> lambda;
  Number value;
  Number array_rhs;               // 1, or log_M(M/n) in strict mode
  std::vector<Number> array_duals; // s_j
  std::vector<Number> bound_duals; // zeta_i
  std::uint64_t cache_words{0};
};

auto solve_tiling_lp(const LoopNest &nest, std::uint64_t cache_words,
                     const TilingOptions &options = {}) -> TilingSolution;

/// A rectangular tile b_1 x ... x b_d.
struct Tiling {
  std::vector<Number> lambda;
  std::vector<std::uint64_t> dims;
  BigInt volume;
  std::vector<std::uint64_t> footprints; // prod_{i in supp_j} b_i
};

/// b_i = max(1, floor(M^lambda_i)) clamped to [1, L_i]; every footprint is
/// guaranteed <= M. Exact lambdas are realized with integer arithmetic.
auto realize_tile(const LoopNest &nest, const std::vector<Number> &lambda,
                  std::uint64_t cache_words) -> Tiling;

/// Realizes an LP solution. With `strict_footprint` each array gets at most
/// floor(M/n) words so a tile's footprints sum to at most M.
auto realize_tile(const LoopNest &nest, const TilingSolution &solution,
                  bool strict_footprint = false) -> Tiling;

/// A Tiling for explicitly chosen dimensions (no exponents).
auto make_tiling(const LoopNest &nest, std::vector<std::uint64_t> dims)
  -> Tiling;

/// Problems with `dims` as a tiling of `nest` under cache size M (bounds,
/// arity, per-array footprint). Empty when valid.
auto tiling_violations(const LoopNest &nest,
                       const std::vector<std::uint64_t> &dims,
                       std::uint64_t cache_words) -> std::vector<std::string>;

struct DualityCertificate {
  Number lp_value;
  Number dual_value; // sum beta_i zeta_i + sum s_j
  Number k_hat;      // slicing bound; equals dual_value when not enumerated
  bool enumerated{false};
  Subset subset;     // Q* when enumerated
  std::vector<Number> array_duals;
  std::vector<Number> bound_duals;
  double gap{0.0};             // |lp_value - k_hat|
  double dual_infeasibility{0.0};
  bool valid{false};
};

/// Compares the tiling LP optimum with the best slicing bound and checks the
/// dual multipliers. Falls back to the dual LP value when d is too large to
/// enumerate subsets.
auto duality_certificate(const LoopNest &nest, std::uint64_t cache_words,
                         Mode mode = Mode::Float) -> DualityCertificate;

/// Two-level pseudo-code for the tiled nest; grammar in docs/codegen.md.
auto emit_tiled_loops(const LoopNest &nest, const Tiling &tiling) -> std::string;

} // namespace tileopt
