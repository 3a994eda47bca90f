#pragma once

#include "tileopt/numeric.hpp"

#include <cstddef>
#include <vector>

namespace tileopt::lp {

enum class Sense { Maximize, Minimize };
enum class Relation { LessEqual, GreaterEqual };
enum class Status { Optimal, Infeasible, Unbounded };

auto to_string(Status s) -> const char *;

/// optimize  objective . x
/// s.t.      rows[i] . x  (<= | >=)  rhs[i]
///           x >= lower_bounds   (all zero when empty)
template <class T>
struct Problem {
  Sense sense{Sense::Maximize};
  std::vector<T> objective;
  std::vector<std::vector<T>> rows;
  std::vector<Relation> relations;
  std::vector<T> rhs;
  std::vector<T> lower_bounds;

  [[nodiscard]] auto num_variables() const -> std::size_t {
    return objective.size();
  }
  [[nodiscard]] auto num_constraints() const -> std::size_t {
    return rows.size();
  }
  void add_row(std::vector<T> coeffs, Relation rel, T b) {
    rows.push_back(std::move(coeffs));
    relations.push_back(rel);
    rhs.push_back(std::move(b));
  }
};

/// `dual[i]` is the sensitivity of the optimal objective to rhs[i]. For a
/// maximization, <= rows carry nonnegative multipliers and >= rows
/// nonpositive ones; for a minimization the signs flip.
template <class T>
struct Solution {
  Status status{Status::Infeasible};
  T objective{};
  std::vector<T> primal;
  std::vector<T> dual;
  std::size_t pivots{0};
};

struct Options {
  std::size_t max_pivots{20000};
};

/// Dense two-phase primal simplex with Bland's rule. Deterministic for a
/// fixed problem. Throws std::invalid_argument on inconsistent dimensions
/// and InternalError when the pivot cap is exceeded.
template <class T>
auto solve(const Problem<T> &problem, const Options &options = {})
  -> Solution<T>;

extern template auto solve(const Problem<double> &, const Options &)
  -> Solution<double>;
extern template auto solve(const Problem<Rational> &, const Options &)
  -> Solution<Rational>;

/// b . y plus the lower-bound contribution of the reduced costs; equals the
/// primal objective at an optimum (strong duality).
template <class T>
auto dual_objective(const Problem<T> &problem, const Solution<T> &solution)
  -> T;

/// Largest constraint or bound violation of `x` (0 when feasible).
template <class T>
auto primal_violation(const Problem<T> &problem, const std::vector<T> &x) -> T;

/// Largest violation of dual feasibility: sign conditions on `y` and
/// reduced-cost optimality conditions at the variable lower bounds.
template <class T>
auto dual_violation(const Problem<T> &problem, const std::vector<T> &y) -> T;

auto to_float(const Problem<Rational> &problem) -> Problem<double>;

} // namespace tileopt::lp
