#pragma once

#include "tileopt/hbl.hpp"
#include "tileopt/model.hpp"
#include "tileopt/oracle.hpp"
#include "tileopt/simulate.hpp"
#include "tileopt/tiling.hpp"

#include <string>

namespace tileopt {

enum class Format { Text, Json };

/// Report schemas are versioned through their "schema" field; see
/// docs/reports.md. JSON output is deterministic for identical inputs.
inline constexpr const char *kSchemaVersion = "1";

auto render_bound(const LoopNest &nest, const BoundReport &report, Format format)
  -> std::string;

auto render_tiling(const LoopNest &nest, const TilingSolution &solution,
                   const Tiling &tiling, bool strict_footprint, Format format)
  -> std::string;

auto render_certificate(const LoopNest &nest, std::uint64_t cache_words,
                        const DualityCertificate &certificate, Format format)
  -> std::string;

auto render_rect_verification(const LoopNest &nest, std::uint64_t cache_words,
                              const RectVerification &v, Format format)
  -> std::string;

auto render_rectangle_check(const LoopNest &nest, std::uint64_t cache_words,
                            const RectangleCheck &check, Format format)
  -> std::string;

auto render_simulation(const LoopNest &nest, std::uint64_t cache_words,
                       const Tiling &tiling, const SimReport &report,
                       Format format) -> std::string;

} // namespace tileopt
