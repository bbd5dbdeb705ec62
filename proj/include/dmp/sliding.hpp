#pragma once

#include <functional>
#include <vector>

#include "dmp/engine.hpp"
#include "dmp/topology.hpp"

namespace dmp {

// Monotone operator split g = A + B with A expensive (oracle calls) and B
// cheap-but-communication-bound. Evaluation counters are part of the
// contract: they increment exactly once per map evaluation.
class SplitOperator {
 public:
  using Map = std::function<Vec(const Vec&)>;

  SplitOperator(Map a, Map b, double lip_a, double lip_b, double mu)
      : a_(std::move(a)), b_(std::move(b)), lip_a_(lip_a), lip_b_(lip_b), mu_(mu) {}

  Vec eval_a(const Vec& v) {
    ++n_a_;
    return a_(v);
  }
  Vec eval_b(const Vec& v) {
    ++n_b_;
    return b_(v);
  }
  double lip_a() const { return lip_a_; }
  double lip_b() const { return lip_b_; }
  double mu() const { return mu_; }
  long count_a() const { return n_a_; }
  long count_b() const { return n_b_; }
  void reset_counters() { n_a_ = n_b_ = 0; }

 private:
  Map a_, b_;
  double lip_a_, lip_b_, mu_;
  long n_a_ = 0;
  long n_b_ = 0;
};

// Euclidean feasible set as a projector.
using Projector = std::function<Vec(const Vec&)>;
Projector identity_projector();
Projector map_projector(const MirrorMap& map);  // Euclidean maps only

struct SlidingConfig {
  double eta = 0.0;     // outer step, min{1/(2 L_A), 1/(6 mu_g)}
  double delta = 0.0;   // inner accuracy, min{1/4, [64/(eta mu) + 64 eta L_B^2/mu]^-1}
  int inner_t = 0;      // FBF iterations per outer step
  int outer_n = 0;
  double reg_alpha = 0.0;   // regularizer weight of the dual blocks
  double reg_gamma = 0.0;   // consensus-coupling balance

  // Derives eta/delta/T/N for a target squared-distance accuracy eps,
  // given a bound r0_sq on ||zeta^0 - zeta*||^2.
  static SlidingConfig derive(double lip_a, double lip_b, double mu, double eps,
                              double r0_sq);
};

// FBF iteration count that guarantees ||theta - theta_hat||^2 <= delta *
// ||start - theta_hat||^2 for the (1 + eta L_B)-Lipschitz, 1-strongly
// monotone auxiliary operator.
int fbf_iterations(double eta, double lip_b, double delta);

// Solves the auxiliary variational inequality
//   <eta B(theta) + theta - nu, zeta - theta> >= 0 for all zeta in Q
// by Tseng's forward-backward-forward splitting with step
// 1/(2 (1 + eta L_B)), starting from `start`, for `iterations` steps.
// A 0-Lipschitz B is constant, so the solve collapses to one projection.
Vec fbf_inner(SplitOperator& op, double eta, const Vec& nu, const Projector& proj,
              const Vec& start, int iterations);

struct SlidingRunResult {
  Vec point;
  long calls_a = 0;
  long calls_b = 0;
  std::vector<double> distances;  // ||zeta^k - reference||^2 when reference given
};

// Outer scheme: nu = zeta - eta A(zeta); inner solve on B; forward
// correction omega = theta + eta (A(zeta) - A(theta)); projection.
// `reference` (when non-empty) is only used to log per-step distances.
SlidingRunResult sliding_run(SplitOperator& op, const Projector& proj,
                             const Vec& start, const SlidingConfig& config,
                             const Vec& reference = {});

// Splits the regularized coupled objective
//   F + gamma<s, W y> + gamma<z, W x> + (alpha/2)||s||^2 - (alpha/2)||z||^2
// into A (the F vector field) and B (coupling + regularizer). Requires every
// node objective mu-strongly convex-concave. The flattened variable order is
// (x_1..x_m, p_1..p_m, s_1..s_m, y_1..y_m, q_1..q_m, z_1..z_m).
struct RegularizedSplit {
  SplitOperator op;
  Projector projector;
  int dimension = 0;
};
RegularizedSplit regularize_saddle(const SaddleProblem& problem,
                                   const GossipMatrix& w, double gamma,
                                   double alpha, double mu, double lip_f);

// Parameter choices tying the regularization to a target accuracy:
// alpha = eps gamma^2 lambda_min_pos^2 / (4 M^2) and
// gamma^2 = 4 M^2 mu / (eps lambda_min_pos^2).
double sliding_reg_alpha(double eps, double gamma, double lambda_min_pos, double m_bound);
double sliding_reg_gamma(double eps, double mu, double lambda_min_pos, double m_bound);

}  // namespace dmp
