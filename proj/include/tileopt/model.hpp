#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tileopt {

struct LoopIndex {
  std::string name;
  std::uint64_t bound{1};

  auto operator==(const LoopIndex &) const -> bool = default;
};

/// An array referenced through a projection of the loop indices. `support`
/// lists the loop names the subscript depends on.
struct ArrayAccess {
  std::string name;
  std::vector<std::string> support;

  auto operator==(const ArrayAccess &) const -> bool = default;
};

/// A projective loop nest:
///
///   for x_1 in [L_1], ..., x_d in [L_d]:
///     touch A_1[supp_1], ..., A_n[supp_n]
///
/// Loop order in `loops` defines the column order of every downstream
/// vector and matrix; array order defines the row order.
struct LoopNest {
  std::string name;
  std::vector<LoopIndex> loops;
  std::vector<ArrayAccess> arrays;

  [[nodiscard]] auto depth() const -> std::size_t { return loops.size(); }
  [[nodiscard]] auto num_arrays() const -> std::size_t { return arrays.size(); }
  [[nodiscard]] auto bounds() const -> std::vector<std::uint64_t>;
  [[nodiscard]] auto loop_position(std::string_view name) const
    -> std::size_t; // npos if absent

  auto operator==(const LoopNest &) const -> bool = default;
};

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

struct Violation {
  std::string rule;
  std::string entity;
  std::string message;
};

/// Every broken LoopNest invariant; empty iff the nest is valid.
auto validate(const LoopNest &nest) -> std::vector<Violation>;

/// Throws InputError listing all violations if the nest is invalid.
void require_valid(const LoopNest &nest);

/// Parses and validates a nest document. Throws InputError on malformed
/// JSON (with line/column), schema violations (naming the field), or
/// invariant violations.
auto parse_loopnest(std::string_view text) -> LoopNest;
auto load_loopnest(const std::string &path) -> LoopNest;
auto to_json_text(const LoopNest &nest) -> std::string;

using SupportMatrix = std::vector<std::vector<int>>;

/// n x d 0/1 matrix; entry (j, i) is 1 iff loop i is in the support of
/// array j. Requires a valid nest.
auto support_matrix(const LoopNest &nest) -> SupportMatrix;

/// Loop positions in each array's support, in loop order.
auto support_positions(const LoopNest &nest)
  -> std::vector<std::vector<std::size_t>>;

/// R_i: positions of the arrays whose support contains loop i.
auto arrays_containing(const LoopNest &nest, std::size_t loop)
  -> std::vector<std::size_t>;

/// True when every array fits in a cache of `cache_words` words on its own,
/// i.e. the whole nest can run as a single tile.
auto fits_in_cache(const LoopNest &nest, std::uint64_t cache_words) -> bool;

} // namespace tileopt
