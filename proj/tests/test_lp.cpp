#include "tileopt/errors.hpp"
#include "tileopt/lp.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace tileopt;
using lp::Relation;
using lp::Sense;
using lp::Status;

namespace {

auto matmul_hbl() -> lp::Problem<Rational> {
  lp::Problem<Rational> p;
  p.sense = Sense::Minimize;
  p.objective = {1, 1, 1};
  p.add_row({1, 1, 0}, Relation::GreaterEqual, 1);
  p.add_row({0, 1, 1}, Relation::GreaterEqual, 1);
  p.add_row({1, 0, 1}, Relation::GreaterEqual, 1);
  return p;
}

// Random bounded LPs with small integer data. Maximization over <= rows with
// nonnegative coefficients is always bounded; a few >= rows make it
// possibly infeasible.
auto random_problem(std::mt19937_64 &rng, bool degenerate) -> lp::Problem<Rational> {
  std::uniform_int_distribution<int> nv(1, 5), nc(1, 6), coef(0, 3), obj(-2, 4),
    rhs(0, 6), rel(0, 4);
  lp::Problem<Rational> p;
  p.sense = rel(rng) % 2 ? Sense::Maximize : Sense::Minimize;
  const int n = nv(rng);
  const int m = nc(rng);
  for (int i = 0; i < n; ++i)
    p.objective.push_back(p.sense == Sense::Maximize ? obj(rng) : std::abs(obj(rng)));
  for (int r = 0; r < m; ++r) {
    std::vector<Rational> row;
    for (int i = 0; i < n; ++i)
      row.push_back(coef(rng));
    auto b = degenerate && r % 2 == 0 ? 0 : rhs(rng);
    p.add_row(row, rel(rng) == 0 ? Relation::GreaterEqual : Relation::LessEqual, b);
  }
  // Keep maximizations bounded: a box row over all variables.
  std::vector<Rational> ones(n, 1);
  p.add_row(ones, Relation::LessEqual, 10);
  return p;
}

} // namespace

TEST_CASE("matmul HBL LP in rational mode") {
  auto sol = lp::solve(matmul_hbl());
  REQUIRE(sol.status == Status::Optimal);
  CHECK(sol.objective == Rational(3, 2));
  CHECK(sol.primal == std::vector<Rational>{Rational(1, 2), Rational(1, 2), Rational(1, 2)});
  CHECK(lp::dual_objective(matmul_hbl(), sol) == Rational(3, 2));
  CHECK(lp::dual_violation(matmul_hbl(), sol.dual) == 0);
}

TEST_CASE("single-variable maximum") {
  lp::Problem<double> p;
  p.objective = {1};
  p.add_row({1}, Relation::LessEqual, 1);
  auto sol = lp::solve(p);
  REQUIRE(sol.status == Status::Optimal);
  CHECK(sol.objective == doctest::Approx(1.0));
}

TEST_CASE("infeasible system") {
  lp::Problem<Rational> p;
  p.objective = {1};
  p.add_row({1}, Relation::LessEqual, -1);
  CHECK(lp::solve(p).status == Status::Infeasible);
  CHECK(lp::solve(lp::to_float(p)).status == Status::Infeasible);
}

TEST_CASE("unbounded system") {
  lp::Problem<double> p;
  p.objective = {1, 1};
  p.add_row({1, -1}, Relation::LessEqual, 1);
  CHECK(lp::solve(p).status == Status::Unbounded);
}

TEST_CASE("lower bounds shift the feasible region") {
  lp::Problem<Rational> p;
  p.sense = Sense::Minimize;
  p.objective = {1, 2};
  p.lower_bounds = {Rational(1, 3), 1};
  p.add_row({1, 1}, Relation::GreaterEqual, 2);
  auto sol = lp::solve(p);
  REQUIRE(sol.status == Status::Optimal);
  CHECK(sol.objective == Rational(3));
  CHECK(sol.primal == std::vector<Rational>{1, 1});
  CHECK(lp::dual_objective(p, sol) == sol.objective);
}

TEST_CASE("dimension mismatch is rejected") {
  lp::Problem<double> p;
  p.objective = {1, 1};
  p.add_row({1}, Relation::LessEqual, 1);
  CHECK_THROWS_AS(lp::solve(p), std::invalid_argument);
}

TEST_CASE("pivot cap is reported") {
  lp::Options opts;
  opts.max_pivots = 0;
  CHECK_THROWS_AS(lp::solve(matmul_hbl(), opts), InternalError);
}

TEST_CASE("deterministic output") {
  auto a = lp::solve(lp::to_float(matmul_hbl()));
  auto b = lp::solve(lp::to_float(matmul_hbl()));
  CHECK(a.primal == b.primal);
  CHECK(a.dual == b.dual);
  CHECK(a.pivots == b.pivots);
}

TEST_CASE("agrees with vertex enumeration, both modes, with valid duals") {
  std::mt19937_64 rng(20240);
  int optimal = 0;
  for (int t = 0; t < 400; ++t) {
    auto p = random_problem(rng, t % 3 == 0);
    auto expected = testsupport::vertex_optimum(p);
    auto exact = lp::solve(p);
    auto approx = lp::solve(lp::to_float(p));
    if (!expected) {
      CHECK(exact.status == Status::Infeasible);
      CHECK(approx.status == Status::Infeasible);
      continue;
    }
    ++optimal;
    REQUIRE(exact.status == Status::Optimal);
    REQUIRE(approx.status == Status::Optimal);
    CHECK(exact.objective == *expected);
    CHECK(std::abs(approx.objective - to_double(*expected)) <= 1e-9);
    CHECK(lp::primal_violation(p, exact.primal) == 0);
    CHECK(lp::dual_violation(p, exact.dual) == 0);
    CHECK(lp::dual_objective(p, exact) == exact.objective);
    auto fp = lp::to_float(p);
    CHECK(lp::primal_violation(fp, approx.primal) <= 1e-9);
    CHECK(lp::dual_violation(fp, approx.dual) <= 1e-9);
    CHECK(std::abs(lp::dual_objective(fp, approx) - approx.objective) <= 1e-9);
  }
  CHECK(optimal > 150);
}

TEST_CASE("degenerate covering LPs terminate") {
  // Many redundant rows through the same vertex, d + n <= 12.
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> nv(2, 5), bit(0, 1);
  for (int t = 0; t < 150; ++t) {
    const int n = nv(rng);
    const int m = 11 - n;
    lp::Problem<Rational> p;
    p.sense = Sense::Minimize;
    p.objective.assign(n, 1);
    for (int r = 0; r < m; ++r) {
      std::vector<Rational> row(n, 0);
      row[r % n] = 1;
      for (int i = 0; i < n; ++i)
        if (bit(rng))
          row[i] = 1;
      p.add_row(row, Relation::GreaterEqual, 1);
      if (r == 0)
        p.add_row(row, Relation::GreaterEqual, 1);
    }
    auto sol = lp::solve(p);
    REQUIRE(sol.status == Status::Optimal);
    CHECK(sol.objective == *testsupport::vertex_optimum(p));
    auto fsol = lp::solve(lp::to_float(p));
    CHECK(std::abs(fsol.objective - to_double(sol.objective)) <= 1e-9);
  }
}
