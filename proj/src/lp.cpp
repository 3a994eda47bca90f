#include "tileopt/lp.hpp"

#include "tileopt/errors.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace tileopt::lp {

auto to_string(Status s) -> const char * {
  switch (s) {
  case Status::Optimal:
    return "optimal";
  case Status::Infeasible:
    return "infeasible";
  case Status::Unbounded:
    return "unbounded";
  }
  return "unknown";
}

namespace {

constexpr std::size_t npos_column = static_cast<std::size_t>(-1);

template <class T>
void check_dimensions(const Problem<T> &p) {
  const auto n = p.num_variables();
  const auto m = p.num_constraints();
  if (p.relations.size() != m || p.rhs.size() != m)
    throw std::invalid_argument("LP: rows, relations and rhs differ in length");
  for (std::size_t i = 0; i < m; ++i)
    if (p.rows[i].size() != n)
      throw std::invalid_argument("LP: row " + std::to_string(i) + " has " +
                                  std::to_string(p.rows[i].size()) +
                                  " coefficients, expected " +
                                  std::to_string(n));
  if (!p.lower_bounds.empty() && p.lower_bounds.size() != n)
    throw std::invalid_argument("LP: lower bound count differs from variables");
}

// Tableau over [structural | slack | artificial | rhs]. The artificial
// block starts as the identity, so it always holds B^-1.
template <class T>
class Tableau {
public:
  Tableau(std::size_t rows, std::size_t structural)
    : m_(rows), n_(structural), width_(structural + 2 * rows + 1),
      cells_(rows * width_), basis_(rows) {}

  auto at(std::size_t i, std::size_t j) -> T & { return cells_[i * width_ + j]; }
  auto rhs(std::size_t i) -> T & { return at(i, width_ - 1); }
  [[nodiscard]] auto rows() const -> std::size_t { return m_; }
  [[nodiscard]] auto columns() const -> std::size_t { return width_ - 1; }
  [[nodiscard]] auto slack(std::size_t i) const -> std::size_t { return n_ + i; }
  [[nodiscard]] auto artificial(std::size_t i) const -> std::size_t {
    return n_ + m_ + i;
  }
  [[nodiscard]] auto is_artificial(std::size_t j) const -> bool {
    return j >= n_ + m_;
  }
  auto basis() -> std::vector<std::size_t> & { return basis_; }

  void pivot(std::size_t r, std::size_t c) {
    T p = at(r, c);
    for (std::size_t j = 0; j < width_; ++j)
      at(r, j) /= p;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r)
        continue;
      T f = at(i, c);
      if (f == T(0))
        continue;
      for (std::size_t j = 0; j < width_; ++j)
        at(i, j) -= f * at(r, j);
      if constexpr (std::is_floating_point_v<T>)
        at(i, c) = 0;
    }
    basis_[r] = c;
  }

  // c_j - c_B . B^-1 A_j
  auto reduced_cost(const std::vector<T> &cost, std::size_t j) -> T {
    T d = cost[j];
    for (std::size_t i = 0; i < m_; ++i)
      if (cost[basis_[i]] != T(0))
        d -= cost[basis_[i]] * at(i, j);
    return d;
  }

private:
  std::size_t m_, n_, width_;
  std::vector<T> cells_;
  std::vector<std::size_t> basis_;
};

enum class PhaseResult { Optimal, Unbounded };

// Maximizes cost . z over the tableau's columns with Bland's rule.
template <class T>
auto run_phase(Tableau<T> &tab, const std::vector<T> &cost,
               std::size_t allowed_columns, std::size_t &pivots,
               std::size_t max_pivots) -> PhaseResult {
  std::vector<bool> in_basis(tab.columns(), false);
  for (;;) {
    std::fill(in_basis.begin(), in_basis.end(), false);
    for (auto b : tab.basis())
      in_basis[b] = true;

    std::size_t enter = npos_column;
    for (std::size_t j = 0; j < allowed_columns; ++j) {
      if (in_basis[j])
        continue;
      if (is_positive(tab.reduced_cost(cost, j))) {
        enter = j;
        break;
      }
    }
    if (enter == npos_column)
      return PhaseResult::Optimal;

    std::size_t leave = npos_column;
    T best_ratio{};
    for (std::size_t i = 0; i < tab.rows(); ++i) {
      if (!is_positive(tab.at(i, enter)))
        continue;
      T ratio = tab.rhs(i) / tab.at(i, enter);
      bool better = leave == npos_column;
      if (!better) {
        T diff = ratio - best_ratio;
        if (is_negative(diff))
          better = true;
        else if (is_zero(diff) && tab.basis()[i] < tab.basis()[leave])
          better = true;
      }
      if (better) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave == npos_column)
      return PhaseResult::Unbounded;

    if (++pivots > max_pivots)
      throw InternalError("LP: pivot cap of " + std::to_string(max_pivots) +
                          " exceeded");
    tab.pivot(leave, enter);
  }
}

template <class T>
auto snap(T x) -> T {
  if constexpr (std::is_floating_point_v<T>)
    return is_zero(x) ? T(0) : x;
  else
    return x;
}

} // namespace

template <class T>
auto solve(const Problem<T> &p, const Options &options) -> Solution<T> {
  check_dimensions(p);
  const std::size_t n = p.num_variables();
  const std::size_t m = p.num_constraints();
  std::vector<T> lb = p.lower_bounds.empty() ? std::vector<T>(n, T(0))
                                             : p.lower_bounds;

  Tableau<T> tab(m, n);
  std::vector<int> row_sign(m, 1);
  for (std::size_t i = 0; i < m; ++i) {
    T b = p.rhs[i];
    for (std::size_t j = 0; j < n; ++j)
      b -= p.rows[i][j] * lb[j];
    row_sign[i] = b < T(0) ? -1 : 1;
    const T s(row_sign[i]);
    for (std::size_t j = 0; j < n; ++j)
      tab.at(i, j) = s * p.rows[i][j];
    tab.at(i, tab.slack(i)) =
      s * T(p.relations[i] == Relation::LessEqual ? 1 : -1);
    tab.at(i, tab.artificial(i)) = T(1);
    tab.rhs(i) = s * b;
    tab.basis()[i] = tab.artificial(i);
  }

  Solution<T> sol;
  const std::size_t structural = n + m;

  // Phase 1: drive the artificial variables to zero.
  std::vector<T> phase1(tab.columns(), T(0));
  for (std::size_t i = 0; i < m; ++i)
    phase1[tab.artificial(i)] = T(-1);
  run_phase(tab, phase1, structural, sol.pivots, options.max_pivots);
  T infeasibility(0);
  for (std::size_t i = 0; i < m; ++i)
    if (tab.is_artificial(tab.basis()[i]))
      infeasibility += tab.rhs(i);
  if (is_positive(infeasibility)) {
    sol.status = Status::Infeasible;
    return sol;
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (!tab.is_artificial(tab.basis()[i]))
      continue;
    for (std::size_t j = 0; j < structural; ++j) {
      if (!is_zero(tab.at(i, j))) {
        tab.pivot(i, j);
        break;
      }
    }
    // A row with no structural entry is redundant; its artificial stays
    // basic at zero.
  }

  // Phase 2 on the real objective, maximized.
  const T direction(p.sense == Sense::Maximize ? 1 : -1);
  std::vector<T> phase2(tab.columns(), T(0));
  for (std::size_t j = 0; j < n; ++j)
    phase2[j] = direction * p.objective[j];
  if (run_phase(tab, phase2, structural, sol.pivots, options.max_pivots) ==
      PhaseResult::Unbounded) {
    sol.status = Status::Unbounded;
    return sol;
  }

  sol.status = Status::Optimal;
  sol.primal = lb;
  for (std::size_t i = 0; i < m; ++i)
    if (tab.basis()[i] < n)
      sol.primal[tab.basis()[i]] += snap(tab.rhs(i));
  sol.objective = T(0);
  for (std::size_t j = 0; j < n; ++j)
    sol.objective += p.objective[j] * sol.primal[j];

  sol.dual.assign(m, T(0));
  for (std::size_t r = 0; r < m; ++r) {
    T y(0);
    for (std::size_t i = 0; i < m; ++i)
      if (phase2[tab.basis()[i]] != T(0))
        y += phase2[tab.basis()[i]] * tab.at(i, tab.artificial(r));
    sol.dual[r] = snap(T(direction * T(row_sign[r]) * y));
  }
  return sol;
}

template <class T>
auto dual_objective(const Problem<T> &p, const Solution<T> &s) -> T {
  const std::size_t n = p.num_variables();
  T value(0);
  for (std::size_t i = 0; i < p.num_constraints(); ++i)
    value += s.dual[i] * p.rhs[i];
  if (!p.lower_bounds.empty()) {
    for (std::size_t j = 0; j < n; ++j) {
      T r = p.objective[j];
      for (std::size_t i = 0; i < p.num_constraints(); ++i)
        r -= s.dual[i] * p.rows[i][j];
      value += r * p.lower_bounds[j];
    }
  }
  return value;
}

template <class T>
auto primal_violation(const Problem<T> &p, const std::vector<T> &x) -> T {
  T worst(0);
  for (std::size_t j = 0; j < x.size(); ++j) {
    T lbj = p.lower_bounds.empty() ? T(0) : p.lower_bounds[j];
    worst = std::max(worst, T(lbj - x[j]));
  }
  for (std::size_t i = 0; i < p.num_constraints(); ++i) {
    T ax(0);
    for (std::size_t j = 0; j < x.size(); ++j)
      ax += p.rows[i][j] * x[j];
    T v = p.relations[i] == Relation::LessEqual ? T(ax - p.rhs[i])
                                                : T(p.rhs[i] - ax);
    worst = std::max(worst, v);
  }
  return worst;
}

template <class T>
auto dual_violation(const Problem<T> &p, const std::vector<T> &y) -> T {
  // Normalize to maximization: multipliers on <= rows must be >= 0, on >=
  // rows <= 0, and every reduced cost must be <= 0.
  const T direction(p.sense == Sense::Maximize ? 1 : -1);
  T worst(0);
  for (std::size_t i = 0; i < p.num_constraints(); ++i) {
    T yi = direction * y[i];
    T v = p.relations[i] == Relation::LessEqual ? T(-yi) : yi;
    worst = std::max(worst, v);
  }
  for (std::size_t j = 0; j < p.num_variables(); ++j) {
    T r = direction * p.objective[j];
    for (std::size_t i = 0; i < p.num_constraints(); ++i)
      r -= direction * y[i] * p.rows[i][j];
    worst = std::max(worst, r);
  }
  return worst;
}

auto to_float(const Problem<Rational> &p) -> Problem<double> {
  auto conv = [](const std::vector<Rational> &v) {
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto &x : v)
      out.push_back(to_double(x));
    return out;
  };
  Problem<double> q;
  q.sense = p.sense;
  q.objective = conv(p.objective);
  for (const auto &r : p.rows)
    q.rows.push_back(conv(r));
  q.relations = p.relations;
  q.rhs = conv(p.rhs);
  q.lower_bounds = conv(p.lower_bounds);
  return q;
}

template auto solve(const Problem<double> &, const Options &) -> Solution<double>;
template auto solve(const Problem<Rational> &, const Options &)
  -> Solution<Rational>;
template auto dual_objective(const Problem<double> &, const Solution<double> &)
  -> double;
template auto dual_objective(const Problem<Rational> &,
                             const Solution<Rational> &) -> Rational;
template auto primal_violation(const Problem<double> &,
                               const std::vector<double> &) -> double;
template auto primal_violation(const Problem<Rational> &,
                               const std::vector<Rational> &) -> Rational;
template auto dual_violation(const Problem<double> &,
                             const std::vector<double> &) -> double;
template auto dual_violation(const Problem<Rational> &,
                             const std::vector<Rational> &) -> Rational;

} // namespace tileopt::lp
