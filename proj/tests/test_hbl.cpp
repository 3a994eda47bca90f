#include "tileopt/errors.hpp"
#include "tileopt/fixtures.hpp"
#include "tileopt/hbl.hpp"
#include "tileopt/oracle.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace tileopt;

namespace {

auto exact(const std::vector<Number> &v) -> std::vector<Rational> {
  std::vector<Rational> out;
  for (const auto &n : v) {
    REQUIRE(n.exact);
    out.push_back(*n.exact);
  }
  return out;
}

auto half() -> Rational { return Rational(1, 2); }

} // namespace

TEST_CASE("k_HBL of the fixtures") {
  auto mm = solve_hbl(fixtures::matmul(8, 8, 8), Mode::Rational);
  CHECK(*mm.k_hbl.exact == Rational(3, 2));
  CHECK(exact(mm.weights) == std::vector<Rational>{half(), half(), half()});

  auto nb = solve_hbl(fixtures::nbody(8, 8), Mode::Rational);
  CHECK(*nb.k_hbl.exact == 2);

  LoopNest one{"one", {{"x1", 5}}, {{"A", {"x1"}}}};
  CHECK(*solve_hbl(one, Mode::Rational).k_hbl.exact == 1);
  CHECK(solve_hbl(one).k_hbl.value == doctest::Approx(1.0));
}

TEST_CASE("clipped weights") {
  auto nest = fixtures::matmul(8, 8, 2);
  auto q3 = solve_clipped_hbl(nest, {2}, Mode::Rational);
  CHECK(*q3.total.exact == 1);
  CHECK(exact(q3.weights) == std::vector<Rational>{0, 1, 0});

  auto empty = solve_clipped_hbl(nest, {}, Mode::Rational);
  auto full = solve_hbl(nest, Mode::Rational);
  CHECK(*empty.total.exact == *full.k_hbl.exact);
  CHECK(exact(empty.weights) == exact(full.weights));

  auto all = solve_clipped_hbl(nest, {0, 1, 2}, Mode::Rational);
  CHECK(exact(all.weights) == std::vector<Rational>{0, 0, 0});
  CHECK(*all.total.exact == 0);
}

TEST_CASE("slicing exponent") {
  auto nest = fixtures::matmul(8, 8, 2);
  auto k = slicing_exponent(nest, {2}, {Number(0), Number(1), Number(0)}, 16,
                            Mode::Rational);
  REQUIRE(k.exact);
  CHECK(*k.exact == Rational(5, 4));
  CHECK(slicing_exponent(nest, {2}, {Number(0), Number(1), Number(0)}, 16).value ==
        doctest::Approx(1.25));

  // Q empty: just the weight sum.
  auto k0 = slicing_exponent(nest, {}, {Number(half()), Number(half()), Number(half())},
                             16, Mode::Rational);
  CHECK(*k0.exact == Rational(3, 2));

  // L3 >= sqrt(M): the x3 term vanishes because its coverage is exactly 1.
  auto big = fixtures::matmul(8, 8, 4);
  auto k1 = slicing_exponent(big, {2}, {Number(half()), Number(half()), Number(half())},
                             16, Mode::Rational);
  CHECK(*k1.exact == Rational(3, 2));
}

TEST_CASE("slicing exponent rejects bad input") {
  auto nest = fixtures::matmul(8, 8, 2);
  CHECK_THROWS_AS(slicing_exponent(nest, {2}, {Number(0), Number(1), Number(0)}, 1),
                  InputError);
  // Infeasible for Q = {}: x1 is uncovered... weights (0,0,1) cover x2, x3 only.
  CHECK_THROWS_AS(slicing_exponent(nest, {}, {Number(0), Number(0), Number(1)}, 16),
                  InputError);
}

TEST_CASE("best bound: matmul") {
  auto r = best_bound(fixtures::matmul(512, 512, 512), 4096, Mode::Rational);
  CHECK(*r.k_hat.exact == Rational(3, 2));
  CHECK(r.best.subset.empty());
  REQUIRE(r.lower_bound_exact);
  CHECK(*r.lower_bound_exact == "2097152");
  CHECK(*r.lower_bound_rounded == 2097152);
  CHECK(*r.tile_bound == 262144);
  CHECK(r.subsets_evaluated == 8);
  CHECK_FALSE(r.fits_in_cache);

  auto f = best_bound(fixtures::matmul(512, 512, 512), 4096);
  CHECK(f.k_hat.value == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(f.lower_bound_words == doctest::Approx(2097152.0).epsilon(1e-9));
}

TEST_CASE("best bound: matvec") {
  auto r = best_bound(fixtures::matvec(512, 512), 4096, Mode::Rational);
  CHECK(*r.k_hat.exact == 1);
  CHECK(*r.lower_bound_rounded == 262144);
  CHECK(*r.lower_bound_exact == "262144");
}

TEST_CASE("best bound: n-body") {
  auto r = best_bound(fixtures::nbody(100, 100), 64);
  CHECK(std::exp2(r.log2_tile_bound) == doctest::Approx(4096.0).epsilon(1e-9));
  CHECK(r.lower_bound_words == doctest::Approx(156.25).epsilon(1e-9));
  CHECK(r.log2_lower_bound == doctest::Approx(std::log2(156.25)).epsilon(1e-9));
}

TEST_CASE("best bound guards") {
  LoopNest wide;
  wide.name = "wide";
  for (int i = 0; i < 21; ++i)
    wide.loops.push_back({"x" + std::to_string(i), 2});
  for (int i = 0; i < 21; ++i)
    wide.arrays.push_back({"A" + std::to_string(i), {"x" + std::to_string(i)}});
  CHECK_THROWS_AS(best_bound(wide, 16), LimitError);
  CHECK_THROWS_AS(best_bound(fixtures::matmul(4, 4, 4), 1), InputError);
  CHECK_THROWS_AS(best_bound(fixtures::matmul(100, 4, 4), 16, Mode::Rational),
                  InputError);
}

TEST_CASE("k_hat never exceeds k_HBL, and equals it when every loop is large") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    auto nest = testsupport::random_nest(rng, 5, 5, 1 << 12);
    auto r = best_bound(nest, 16);
    CHECK(r.k_hat.value <= r.hbl.k_hbl.value + 1e-12);
    for (auto &l : nest.loops)
      l.bound = 256; // beta = 2 >= any useful coverage gap
    auto big = best_bound(nest, 16);
    CHECK(big.k_hat.value == doctest::Approx(big.hbl.k_hbl.value).epsilon(1e-12));
  }
}

TEST_CASE("adding a loop to Q never increases the clipped minimum") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 150; ++t) {
    auto nest = testsupport::random_nest(rng, 5, 5, 64);
    const auto d = nest.depth();
    for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
      Subset q;
      for (std::size_t i = 0; i < d; ++i)
        if (mask >> i & 1)
          q.push_back(i);
      auto base = solve_clipped_hbl(nest, q, Mode::Rational);
      for (std::size_t i = 0; i < d; ++i) {
        if (mask >> i & 1)
          continue;
        Subset bigger = q;
        bigger.push_back(i);
        std::sort(bigger.begin(), bigger.end());
        CHECK(*solve_clipped_hbl(nest, bigger, Mode::Rational).total.exact <=
              *base.total.exact);
      }
    }
  }
}

TEST_CASE("M^k bounds every feasible rectangle, for every Q") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 120; ++t) {
    auto nest = testsupport::random_nest(rng, 4, 4, 12);
    for (std::uint64_t m : {2, 4, 8, 16}) {
      auto best = testsupport::naive_rect(nest, m);
      auto exps = loop_exponents(nest, m, Mode::Float);
      for (std::uint32_t mask = 0; mask < (1u << nest.depth()); ++mask) {
        Subset q;
        for (std::size_t i = 0; i < nest.depth(); ++i)
          if (mask >> i & 1)
            q.push_back(i);
        auto w = solve_clipped_hbl(nest, q, Mode::Float);
        auto k = slicing_exponent(nest, q, w.weights, exps);
        CHECK(std::log2(double(best.volume)) <= k.value * std::log2(double(m)) + 1e-9);
      }
    }
  }
}

TEST_CASE("parallel enumeration matches a sequential scan") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 6; ++t) {
    auto nest = testsupport::random_nest(rng, 9, 6, 1 << 10);
    while (nest.depth() < 9)
      nest = testsupport::random_nest(rng, 9, 6, 1 << 10);
    const std::uint64_t m = 32;
    auto r = best_bound(nest, m);
    auto exps = loop_exponents(nest, m, Mode::Float);
    double best = 1e300;
    Subset arg;
    for (std::uint32_t mask = 0; mask < (1u << 9); ++mask) {
      Subset q;
      for (std::size_t i = 0; i < 9; ++i)
        if (mask >> i & 1)
          q.push_back(i);
      auto w = solve_clipped_hbl(nest, q, exps, Mode::Float);
      auto k = slicing_exponent(nest, q, w.weights, exps).value;
      bool tie = std::abs(k - best) <= 1e-12 * std::max(1.0, std::abs(best));
      if ((!tie && k < best) || (tie && subset_less(q, arg))) {
        best = std::min(best, k);
        arg = q;
      }
    }
    CHECK(r.k_hat.value == doctest::Approx(best).epsilon(1e-12));
    CHECK(r.best.subset == arg);
    auto again = best_bound(nest, m);
    CHECK(again.k_hat.value == r.k_hat.value);
    CHECK(again.best.subset == r.best.subset);
  }
}

TEST_CASE("ties go to the lexicographically smallest subset") {
  // n-body with L = M: Q = {} and Q containing large loops all give 2.
  auto r = best_bound(fixtures::nbody(64, 64), 64, Mode::Rational);
  CHECK(*r.k_hat.exact == 2);
  CHECK(r.best.subset.empty());
}
