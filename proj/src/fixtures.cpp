#include "tileopt/fixtures.hpp"

#include "tileopt/errors.hpp"

#include <string>

namespace tileopt::fixtures {

auto matmul(std::uint64_t l1, std::uint64_t l2, std::uint64_t l3) -> LoopNest {
  return {"matmul",
          {{"x1", l1}, {"x2", l2}, {"x3", l3}},
          {{"A1", {"x1", "x3"}}, {"A2", {"x1", "x2"}}, {"A3", {"x2", "x3"}}}};
}

auto matvec(std::uint64_t l1, std::uint64_t l2) -> LoopNest {
  auto nest = matmul(l1, l2, 1);
  nest.name = "matvec";
  return nest;
}

auto tensor_contraction(const std::vector<std::uint64_t> &bounds, std::size_t j,
                        std::size_t k) -> LoopNest {
  const auto d = bounds.size();
  if (!(1 <= j && j + 1 < k && k <= d))
    throw InputError("tensor contraction needs 1 <= j < k-1 < d (got j = " +
                     std::to_string(j) + ", k = " + std::to_string(k) +
                     ", d = " + std::to_string(d) + ")");
  LoopNest nest;
  nest.name = "tensor_contraction";
  for (std::size_t i = 0; i < d; ++i)
    nest.loops.push_back({"x" + std::to_string(i + 1), bounds[i]});
  auto range = [](std::size_t lo, std::size_t hi) {
    std::vector<std::string> out;
    for (std::size_t i = lo; i <= hi; ++i)
      out.push_back("x" + std::to_string(i));
    return out;
  };
  auto out = range(1, j);
  for (auto &x : range(k, d))
    out.push_back(std::move(x));
  nest.arrays = {{"A1", out}, {"A2", range(1, k - 1)}, {"A3", range(j + 1, d)}};
  return nest;
}

auto pointwise_convolution(std::uint64_t batch, std::uint64_t channels,
                           std::uint64_t filters, std::uint64_t width,
                           std::uint64_t height) -> LoopNest {
  return {"pointwise_convolution",
          {{"b", batch}, {"c", channels}, {"k", filters}, {"w", width}, {"h", height}},
          {{"Out", {"k", "h", "w", "b"}},
           {"Image", {"w", "h", "c", "b"}},
           {"Filter", {"k", "c"}}}};
}

auto nbody(std::uint64_t l1, std::uint64_t l2) -> LoopNest {
  return {"nbody",
          {{"x1", l1}, {"x2", l2}},
          {{"A1", {"x1"}}, {"A2", {"x1"}}, {"A3", {"x2"}}}};
}

auto by_name(std::string_view name) -> LoopNest {
  if (name == "matmul")
    return matmul(512, 512, 512);
  if (name == "matvec")
    return matvec(512, 512);
  if (name == "tensor")
    return tensor_contraction({64, 64, 64, 64, 64}, 2, 4);
  if (name == "conv")
    return pointwise_convolution(32, 64, 128, 28, 28);
  if (name == "nbody")
    return nbody(100, 100);
  throw InputError("unknown fixture '" + std::string(name) + "'");
}

} // namespace tileopt::fixtures
