#include "tileopt/numeric.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace tileopt {

auto to_string(const Rational &r) -> std::string {
  std::ostringstream os;
  os << numerator(r);
  if (denominator(r) != 1)
    os << '/' << denominator(r);
  return os.str();
}

namespace {

auto checked_pow(std::uint64_t base, std::uint32_t exp)
  -> std::optional<std::uint64_t> {
  std::uint64_t r = 1;
  for (std::uint32_t i = 0; i < exp; ++i) {
    if (base != 0 && r > std::numeric_limits<std::uint64_t>::max() / base)
      return std::nullopt;
    r *= base;
  }
  return r;
}

// Integer a-th root of m if m is a perfect a-th power.
auto exact_root(std::uint64_t m, std::uint32_t a) -> std::optional<std::uint64_t> {
  auto guess = static_cast<std::uint64_t>(
    std::llround(std::pow(static_cast<double>(m), 1.0 / a)));
  for (std::uint64_t c = guess > 1 ? guess - 1 : 1; c <= guess + 1; ++c) {
    auto p = checked_pow(c, a);
    if (p && *p == m)
      return c;
  }
  return std::nullopt;
}

} // namespace

auto perfect_power(std::uint64_t m) -> PerfectPower {
  if (m < 2)
    return {m, 1};
  for (std::uint32_t a = 63; a >= 2; --a) {
    if (auto r = exact_root(m, a); r && *r >= 2)
      return {*r, a};
  }
  return {m, 1};
}

auto exact_log(std::uint64_t x, std::uint64_t m) -> std::optional<Rational> {
  if (x == 1)
    return Rational(0);
  if (m < 2 || x == 0)
    return std::nullopt;
  auto [base, power] = perfect_power(m);
  std::uint32_t e = 0;
  while (x % base == 0) {
    x /= base;
    ++e;
  }
  if (x != 1)
    return std::nullopt;
  return Rational(e, power);
}

auto floor_power(std::uint64_t m, const Rational &e) -> BigInt {
  if (e <= 0)
    return 1;
  auto p = static_cast<unsigned>(numerator(e));
  auto q = static_cast<unsigned>(denominator(e));
  BigInt target = boost::multiprecision::pow(BigInt(m), p);
  double approx = std::pow(static_cast<double>(m), to_double(e));
  BigInt b(static_cast<std::uint64_t>(std::max(1.0, std::floor(approx))));
  while (b > 1 && boost::multiprecision::pow(b, q) > target)
    --b;
  while (boost::multiprecision::pow(BigInt(b + 1), q) <= target)
    ++b;
  return b;
}

auto saturating_mul(std::uint64_t a, std::uint64_t b) -> std::uint64_t {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
    return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

auto ceil_div(std::uint64_t a, std::uint64_t b) -> std::uint64_t {
  return a / b + (a % b != 0 ? 1 : 0);
}

} // namespace tileopt
