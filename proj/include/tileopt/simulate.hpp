#pragma once

#include "tileopt/model.hpp"
#include "tileopt/numeric.hpp"
#include "tileopt/tiling.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tileopt {

/// Tiles sharing the same clamped extents. Each loop contributes full tiles
/// (extent b_i) and at most one boundary tile (extent L_i mod b_i).
struct TileClass {
  BigInt count;
  std::vector<std::uint64_t> extents;
  std::vector<std::uint64_t> footprints;
  std::uint64_t total{0}; // sum of footprints
};

struct SimReport {
  BigInt tile_count;
  BigInt words_moved;
  std::vector<BigInt> per_array_words;
  double lower_bound_words{0.0};
  double ratio{0.0};
  std::vector<TileClass> tile_classes;
  std::uint64_t max_tile_total{0};
  /// Tiles whose footprints sum to more than M words (allowed under the
  /// per-array budget).
  BigInt tiles_over_aggregate;
  bool fits_in_cache{false};
  std::vector<std::string> warnings;
};

/// Words moved under a cold-cache-per-tile model: every tile loads each
/// array's clamped footprint once. Throws InputError for an invalid tiling.
auto simulate_comm(const LoopNest &nest, const std::vector<std::uint64_t> &dims,
                   std::uint64_t cache_words, double lower_bound_words)
  -> SimReport;

/// Same, taking the lower bound from best_bound (or the tiling LP value when
/// d is too large to enumerate).
auto simulate_comm(const LoopNest &nest, const std::vector<std::uint64_t> &dims,
                   std::uint64_t cache_words) -> SimReport;

/// A parsed emit_tiled_loops program.
struct TiledProgram {
  struct Bound {
    std::int64_t limit{0};          // range(0, limit) ...
    bool clamped{false};            // ... or range(0, min(limit, total - step*var))
    std::int64_t total{0};
    std::int64_t step{0};
    std::string var;
  };
  struct Loop {
    std::string var;
    Bound bound;
  };
  struct Assign {
    std::string target;
    std::int64_t step{0};
    std::string outer;
    std::string inner;
  };
  struct Use {
    std::string array;
    std::vector<std::string> indices;
  };
  std::vector<Loop> loops;
  std::size_t outer_depth{0}; // leading loops over tile coordinates
  std::vector<Assign> assigns;
  std::vector<Use> uses;
};

/// Parses emitted pseudo-code; throws InputError on text outside the grammar.
auto parse_tiled_program(std::string_view text) -> TiledProgram;

/// Runs the program, calling `visit` with the reconstructed original indices
/// (in assignment order) once per innermost iteration.
void interpret(const TiledProgram &program,
               const std::function<void(std::span<const std::int64_t>)> &visit);

struct InterpretedCost {
  std::uint64_t iterations{0};
  std::uint64_t tiles{0};
  std::uint64_t words{0};                 // sum over tiles of distinct elements used
  std::vector<std::uint64_t> per_array;   // same, split by `use` line
};

/// Executes the program tile by tile and counts distinct array elements each
/// tile touches.
auto interpret_cost(const TiledProgram &program) -> InterpretedCost;

} // namespace tileopt
