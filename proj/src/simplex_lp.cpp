#include "dmp/simplex_lp.hpp"

#include <algorithm>
#include <stdexcept>

namespace dmp {

namespace {

// Full-tableau simplex state. Columns: structural variables then one
// artificial per row; the last column is the right-hand side.
struct Tableau {
  int rows = 0;
  int n_struct = 0;
  int n_total = 0;
  std::vector<Vec> t;       // rows x (n_total + 1)
  std::vector<int> basis;   // basic variable per row
  std::vector<char> alive;  // rows dropped as redundant are switched off

  double& rhs(int r) { return t[r][n_total]; }
};

void pivot(Tableau& tab, int pr, int pc) {
  Vec& prow = tab.t[pr];
  const double piv = prow[pc];
  for (double& v : prow) v /= piv;
  for (int r = 0; r < tab.rows; ++r) {
    if (r == pr || !tab.alive[r]) continue;
    Vec& row = tab.t[r];
    const double factor = row[pc];
    if (factor == 0.0) continue;
    for (int c = 0; c <= tab.n_total; ++c) row[c] -= factor * prow[c];
  }
  tab.basis[pr] = pc;
}

// Bland's rule: entering = lowest-index column with negative reduced cost,
// leaving = lowest-index basic variable among the minimal ratios.
// Returns false when the current basis is optimal; throws on unboundedness.
bool simplex_iterate(Tableau& tab, Vec& reduced, double& objective,
                     const std::vector<char>& allowed, double tol) {
  int enter = -1;
  for (int c = 0; c < tab.n_total; ++c) {
    if (!allowed[c]) continue;
    if (reduced[c] < -tol) {
      enter = c;
      break;
    }
  }
  if (enter < 0) return false;

  int leave = -1;
  double best_ratio = 0.0;
  for (int r = 0; r < tab.rows; ++r) {
    if (!tab.alive[r]) continue;
    const double a = tab.t[r][enter];
    if (a <= tol) continue;
    const double ratio = tab.rhs(r) / a;
    if (leave < 0 || ratio < best_ratio - tol ||
        (ratio < best_ratio + tol && tab.basis[r] < tab.basis[leave])) {
      leave = r;
      best_ratio = ratio;
    }
  }
  if (leave < 0) throw std::runtime_error("simplex: unbounded direction");

  pivot(tab, leave, enter);
  // the reduced-cost row transforms like any other tableau row; the step
  // length equals the normalized right-hand side of the pivot row
  const double re = reduced[enter];
  for (int c = 0; c < tab.n_total; ++c) reduced[c] -= re * tab.t[leave][c];
  objective += re * tab.rhs(leave);
  return true;
}

Vec reduced_costs(const Tableau& tab, const Vec& cost, double& objective) {
  Vec reduced = cost;
  objective = 0.0;
  for (int r = 0; r < tab.rows; ++r) {
    if (!tab.alive[r]) continue;
    const double cb = cost[tab.basis[r]];
    if (cb == 0.0) continue;
    for (int c = 0; c < tab.n_total; ++c) reduced[c] -= cb * tab.t[r][c];
    objective += cb * tab.rhs(r);
  }
  return reduced;
}

}  // namespace

LpSolution solve_lp(const LpProblem& problem, double tol) {
  const int rows = problem.e.rows;
  const int n = problem.e.cols;
  if (static_cast<int>(problem.b.size()) != rows ||
      static_cast<int>(problem.c.size()) != n)
    throw std::invalid_argument("solve_lp: inconsistent problem dimensions");

  Tableau tab;
  tab.rows = rows;
  tab.n_struct = n;
  tab.n_total = n + rows;
  tab.t.assign(rows, Vec(tab.n_total + 1, 0.0));
  tab.basis.resize(rows);
  tab.alive.assign(rows, 1);

  for (int r = 0; r < rows; ++r) {
    const double sign = problem.b[r] < 0.0 ? -1.0 : 1.0;
    for (int c = 0; c < n; ++c) tab.t[r][c] = sign * problem.e(r, c);
    tab.t[r][n + r] = 1.0;
    tab.rhs(r) = sign * problem.b[r];
    tab.basis[r] = n + r;
  }

  // phase 1: minimize the sum of artificials
  Vec phase1_cost(tab.n_total, 0.0);
  for (int r = 0; r < rows; ++r) phase1_cost[n + r] = 1.0;
  double objective = 0.0;
  Vec reduced = reduced_costs(tab, phase1_cost, objective);
  std::vector<char> allowed(tab.n_total, 1);
  while (simplex_iterate(tab, reduced, objective, allowed, tol)) {
  }

  LpSolution sol;
  if (objective > 1e-7) return sol;  // infeasible

  // drive basic artificials out; rows where that fails are redundant
  for (int r = 0; r < rows; ++r) {
    if (!tab.alive[r] || tab.basis[r] < n) continue;
    int enter = -1;
    for (int c = 0; c < n; ++c) {
      if (std::fabs(tab.t[r][c]) > 1e-7) {
        enter = c;
        break;
      }
    }
    if (enter >= 0)
      pivot(tab, r, enter);
    else
      tab.alive[r] = 0;
  }

  // phase 2 over structural columns only
  Vec phase2_cost(tab.n_total, 0.0);
  for (int c = 0; c < n; ++c) phase2_cost[c] = problem.c[c];
  reduced = reduced_costs(tab, phase2_cost, objective);
  std::fill(allowed.begin() + n, allowed.end(), 0);
  try {
    while (simplex_iterate(tab, reduced, objective, allowed, tol)) {
    }
  } catch (const std::runtime_error&) {
    sol.feasible = true;
    sol.bounded = false;
    return sol;
  }

  sol.feasible = true;
  sol.v.assign(n, 0.0);
  for (int r = 0; r < rows; ++r) {
    if (tab.alive[r] && tab.basis[r] < n) sol.v[tab.basis[r]] = tab.rhs(r);
  }
  sol.value = 0.0;
  for (int c = 0; c < n; ++c) sol.value += problem.c[c] * sol.v[c];
  return sol;
}

}  // namespace dmp
