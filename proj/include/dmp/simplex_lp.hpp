#pragma once

#include "dmp/common.hpp"

namespace dmp {

// Equality-form linear program: min c.v subject to E v = b, v >= 0.
struct LpProblem {
  Mat e;
  Vec b;
  Vec c;
};

struct LpSolution {
  bool feasible = false;
  bool bounded = true;
  double value = 0.0;
  Vec v;
};

// Dense two-phase primal simplex with Bland's rule (terminates on the highly
// degenerate transportation polytopes used here). Redundant rows discovered
// in phase 1 are dropped. Intended for desk-scale instances, a few hundred
// variables at most.
LpSolution solve_lp(const LpProblem& problem, double tol = 1e-9);

}  // namespace dmp
