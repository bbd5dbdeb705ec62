#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dmp/engine.hpp"
#include "dmp/simplex_lp.hpp"
#include "dmp/topology.hpp"

namespace dmp {

// Fixed-support Wasserstein barycenter instance: n support points, m
// measures, a nonnegative ground cost and its row-major vectorization d.
struct WbInstance {
  int n = 0;
  int m = 0;
  Mat cost;                   // n x n
  Vec d;                      // n^2, row-major
  double max_cost = 0.0;      // ||d||_inf
  std::vector<Vec> measures;  // m histograms on the simplex

  static WbInstance create(Mat cost, std::vector<Vec> measures);
  void validate() const;
};

// Incidence matrix of the transportation polytope: rows 1..n are the row
// marginals of a row-major vectorized plan, rows n+1..2n the column
// marginals; every column has exactly two ones.
Mat incidence_matrix(int n);
Vec apply_incidence(int n, const Vec& plan);      // A p, length 2n
Vec apply_incidence_t(int n, const Vec& dual);    // A^T q, length n^2

// Exact optimal transport value and an optimal plan, via the transportation
// LP. Intended for small n (<= 16 or so).
struct OtResult {
  double value = 0.0;
  Vec plan;  // n^2 row-major
};
OtResult ot_lp_oracle(const Mat& cost, const Vec& p, const Vec& q);

// (1/m) sum_i W(x, y_i)
double wb_objective(const WbInstance& instance, const Vec& x);

// Exact barycenter via the joint LP over (x, p_1..p_m). Returns the optimal
// normalized objective and fills x_out when non-null.
double barycenter_lp(const WbInstance& instance, Vec* x_out = nullptr);

// min over p in the plan simplex of d.p + 2||d||_inf ||A p - b||_1 with
// b = (x, y); equals W(x, y) exactly (the l1 penalty is exact at this
// coefficient). Exposed for the verification suite.
double penalized_transport_lp(const WbInstance& instance, const Vec& x, const Vec& y);

// Saddle reformulation with gradient oracles, gradient bound
// M_x = 2 ||d||_inf sqrt(n), entropic maps for x and p, box for q, and the
// closed-form gap oracle installed.
SaddleProblem build_wb_saddle(const WbInstance& instance, const GossipMatrix& w);

// Exact duality gap of the distributed saddle problem at consensus-projected
// averages (sum over nodes, not normalized by m): the inner max over the box
// is 2||d||_inf ||A p_i - b_i||_1, the inner min is a simplex linear
// minimization jointly over x and the plans.
double wb_gap(const WbInstance& instance, const Vec& x_av,
              const std::vector<Vec>& p_hat, const std::vector<Vec>& q_hat);

// Step sizes of the specialized barycenter solver.
struct WbSolverConfig {
  double alpha = 0.0;  // 1 / (16 m sqrt(2 n ln n) maxC chi)
  double eta = 0.0;    // alpha m n maxC^3 / lambda_min_pos^2
  double beta = 0.0;   // 6 alpha m ln n
  double theta = 0.0;  // 2 alpha m n maxC^2 / lambda_min_pos^2
  int iterations = 0;
  int gap_every = 0;  // 0 -> ceil(N/100)
  int row_every = 1;

  // Derives the step sizes from the instance and the (possibly accelerated)
  // communication spectrum.
  static WbSolverConfig from_instance(const WbInstance& instance,
                                      const MixerRef& w, int iterations);
};

struct WbRunResult {
  std::vector<Vec> barycenters;  // per-node ergodic averages of the x half-steps
  std::vector<Vec> plans;        // ergodic averages of the p half-steps
  std::vector<Vec> duals;        // ergodic averages of the q half-steps
  Vec barycenter_av;             // node mean of barycenters
  RunReport report;
};

// Specialized decentralized Mirror-Prox for barycenters: softmax updates for
// the simplex blocks, clipping for the box block, two gossip exchanges per
// iteration. Reported gap is normalized by m.
WbRunResult dmp_wb_run(const WbInstance& instance, const MixerRef& w,
                       const WbSolverConfig& config);

// Iterative Bregman projections baseline on the entropy-regularized
// problem. Underflow / non-finite states are reported as a divergence event
// with the iteration index, never a crash.
struct IbpResult {
  Vec barycenter;
  std::vector<double> objective_trace;  // entropic-plan transport cost per iteration
  bool diverged = false;
  int divergence_iteration = -1;
};
IbpResult ibp_baseline(const WbInstance& instance, double gamma_reg, int iterations);

// m Gaussian densities discretized on an equally spaced grid and
// renormalized; mean and variance drawn uniformly from the given ranges.
std::vector<Vec> gaussian_histograms(int m, int n, double support_lo,
                                     double support_hi, double mean_lo,
                                     double mean_hi, double var_lo, double var_hi,
                                     std::uint64_t seed);

// squared-distance ground cost on the uniform grid over [lo, hi], rescaled
// so the largest entry is max_entry
Mat grid_cost(int n, double lo, double hi, double max_entry = 1.0);

// CSV interchange: measures one-per-row, cost as an n x n block,
// barycenter as a single row.
std::vector<Vec> parse_measures_csv(const std::string& text);
Mat parse_cost_csv(const std::string& text);
std::string measures_to_csv(const std::vector<Vec>& measures);
std::string vec_to_csv_row(const Vec& v);

}  // namespace dmp
