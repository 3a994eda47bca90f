#pragma once

#include "tileopt/errors.hpp"
#include "tileopt/numeric.hpp"

#include <vector>

namespace tileopt::detail {

template <class T>
auto to_scalar(const Number &x) -> T {
  if constexpr (std::is_floating_point_v<T>) {
    return x.value;
  } else {
    if (!x.exact)
      throw InputError("rational mode needs exact inputs");
    return *x.exact;
  }
}

template <class T>
auto to_scalars(const std::vector<Number> &xs) -> std::vector<T> {
  std::vector<T> out;
  out.reserve(xs.size());
  for (const auto &x : xs)
    out.push_back(to_scalar<T>(x));
  return out;
}

template <class T>
auto from_scalar(const T &x) -> Number {
  return Number(x);
}

} // namespace tileopt::detail
