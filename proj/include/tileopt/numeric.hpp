#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tileopt {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Arithmetic used by the LP-backed computations.
enum class Mode { Float, Rational };

/// Feasibility/optimality tolerance for float mode. Rational mode compares
/// exactly.
inline constexpr double kTolerance = 1e-9;

template <class T>
inline auto is_positive(const T &x) -> bool {
  if constexpr (std::is_floating_point_v<T>)
    return x > kTolerance;
  else
    return x > 0;
}
template <class T>
inline auto is_negative(const T &x) -> bool {
  if constexpr (std::is_floating_point_v<T>)
    return x < -kTolerance;
  else
    return x < 0;
}
template <class T>
inline auto is_zero(const T &x) -> bool {
  return !is_positive(x) && !is_negative(x);
}
/// a <= b up to tolerance.
template <class T>
inline auto leq(const T &a, const T &b) -> bool {
  return !is_positive(T(a - b));
}

inline auto to_double(const Rational &r) -> double {
  return r.convert_to<double>();
}
inline auto to_double(double x) -> double { return x; }

auto to_string(const Rational &r) -> std::string;

/// A scalar result: always carries a double, and the exact rational value
/// when it was computed in rational mode.
struct Number {
  double value{0.0};
  std::optional<Rational> exact;

  Number() = default;
  Number(double v) : value(v) {}
  Number(const Rational &r) : value(to_double(r)), exact(r) {}
  Number(int v) : Number(Rational(v)) {}

  [[nodiscard]] auto is_exact() const -> bool { return exact.has_value(); }
};

/// M = base^power with the smallest possible base (largest power).
struct PerfectPower {
  std::uint64_t base;
  std::uint32_t power;
};
auto perfect_power(std::uint64_t m) -> PerfectPower;

/// log_m(x) as an exact rational when x and m are integer powers of a
/// common base (x = 1 gives 0); nullopt otherwise. Requires m >= 2.
auto exact_log(std::uint64_t x, std::uint64_t m) -> std::optional<Rational>;

/// Largest integer b >= 1 with b <= m^e, e >= 0 rational (exact).
auto floor_power(std::uint64_t m, const Rational &e) -> BigInt;

/// Saturating product; returns UINT64_MAX on overflow.
auto saturating_mul(std::uint64_t a, std::uint64_t b) -> std::uint64_t;

auto ceil_div(std::uint64_t a, std::uint64_t b) -> std::uint64_t;

} // namespace tileopt
