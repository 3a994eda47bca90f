#pragma once

#include "tileopt/model.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace tileopt::fixtures {

/// A1(x1,x3) += A2(x1,x2) * A3(x2,x3)
auto matmul(std::uint64_t l1, std::uint64_t l2, std::uint64_t l3) -> LoopNest;

/// matmul with L3 = 1.
auto matvec(std::uint64_t l1, std::uint64_t l2) -> LoopNest;

/// A1(x1..xj, xk..xd) += A2(x1..x_{k-1}) * A3(x_{j+1}..xd), 1-based j, k
/// with 1 <= j < k-1 < d (so three non-empty index groups).
auto tensor_contraction(const std::vector<std::uint64_t> &bounds, std::size_t j,
                        std::size_t k) -> LoopNest;

/// Out(k,h,w,b) += Image(w,h,c,b) * Filter(k,c)
auto pointwise_convolution(std::uint64_t batch, std::uint64_t channels,
                           std::uint64_t filters, std::uint64_t width,
                           std::uint64_t height) -> LoopNest;

/// A1[x1] = f(A2[x1], A3[x2])
auto nbody(std::uint64_t l1, std::uint64_t l2) -> LoopNest;

/// Fixture by name ("matmul", "matvec", "tensor", "conv", "nbody") with
/// small default bounds; throws InputError for unknown names.
auto by_name(std::string_view name) -> LoopNest;

} // namespace tileopt::fixtures
