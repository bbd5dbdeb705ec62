#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dmp/prox.hpp"
#include "dmp/topology.hpp"

namespace dmp {

// Value and the four partial gradients of one node's objective
// f_i(x, p_i, y, q_i).
struct NodeGradients {
  double value = 0.0;
  Vec gx, gp, gy, gq;
};

// Block Lipschitz constants of the stacked objective F w.r.t. the grouped
// (x,p) / (y,q) norms.
struct BlockLipschitz {
  double min_min = 0.0;  // gradient of the min block vs min-block moves
  double min_max = 0.0;  // gradient of the min block vs max-block moves
  double max_min = 0.0;
  double max_max = 0.0;
};

// The full variable vector zeta = (x, p, s | y, q, z) partitioned into
// per-node slices. s and z are the unconstrained dual slices attached to the
// y- and x-consensus constraints respectively.
struct IterateBlock {
  std::vector<Vec> x, p, s, y, q, z;

  static IterateBlock zeros(int m, int dx, int dp, int dy, int dq);
  void scale(double factor);
  void accumulate(const IterateBlock& other);
  bool finite() const;
};

struct SaddleProblem;
using GapOracle = std::function<double(const SaddleProblem&, const IterateBlock&)>;

// Per-node convex-concave objective with gradient oracles plus the constants
// the step-size theory needs.
struct SaddleProblem {
  int node_count = 0;
  int dim_x = 0, dim_p = 0, dim_y = 0, dim_q = 0;
  std::function<NodeGradients(int node, const Vec& x, const Vec& p,
                              const Vec& y, const Vec& q)>
      oracle;
  MirrorMap map_x, map_p, map_y, map_q;
  double grad_bound_x = 0.0;  // sup ||grad_x f_i||_2 over the feasible set
  double grad_bound_y = 0.0;
  BlockLipschitz lipschitz;
  // Exact duality gap at consensus-projected averages, available only for
  // problem classes with closed-form inner max/min.
  GapOracle gap_oracle;

  IterateBlock initial_block() const;  // prox-centers, s = z = 0
};

// Weights of the combined norm, one squared radius per block.
struct NormWeights {
  double x = 0.0, p = 0.0, y = 0.0, q = 0.0, s = 0.0, z = 0.0;
};

struct EngineConfig {
  double alpha = 0.0;      // 0 -> 1/L_zeta from the smoothness constants
  int iterations = 0;
  NormWeights weights;     // all-zero -> derived from maps and dual radii
  int gap_every = 0;       // 0 -> ceil(N/100)
  int row_every = 1;       // report-row cadence
  int chebyshev_degree = 0;  // 0 = plain gossip, -1 = floor(sqrt(chi)), >0 explicit
  bool record_trace = false;
  std::optional<IterateBlock> initial;  // defaults to prox centers
};

struct ReportRow {
  long iter = 0;
  bool has_gap = false;
  double gap = 0.0;
  double consensus_x = 0.0;
  double consensus_y = 0.0;
  long comm_rounds = 0;
  long oracle_calls = 0;
};

struct RunReport {
  std::vector<ReportRow> rows;
  long total_comm_rounds = 0;
  long total_oracle_calls = 0;
  double final_gap = std::numeric_limits<double>::quiet_NaN();
  double final_consensus_x = 0.0;
  double final_consensus_y = 0.0;

  std::string to_csv() const;  // header: iter,gap,consensus_x,consensus_y,comm_rounds,oracle_calls
};

// One audited event of a decentralized run: a communication exchange or a
// per-node local update, with the highest nonzero coordinate (1-based, 0 for
// all-zero; entries below 1e-300 count as zero) of the min- and max-side
// memory of every node.
struct TraceEvent {
  long index = 0;
  char type = 'L';  // 'C' communication, 'L' local computation
  std::vector<int> max_nonzero_x;
  std::vector<int> max_nonzero_y;
};

struct DmpRunResult {
  IterateBlock averages;  // ergodic averages of the half-step iterates
  RunReport report;
  std::vector<TraceEvent> trace;
};

// Dual radii of the Lagrange multipliers at a solution:
// R_Z^2 = 2 m M_x^2 / lambda_min_pos^2 and likewise R_S^2 for M_y.
std::pair<double, double> dual_radii(double grad_bound_x, double grad_bound_y,
                                     const GossipMatrix& w, int node_count);

// 2 max{L_uu, L_uv, L_vu, L_vv}
double combine_lipschitz(double l_uu, double l_uv, double l_vu, double l_vv);

struct SmoothnessConstants {
  double l_uu = 0.0, l_uv = 0.0, l_vu = 0.0, l_vv = 0.0;
};

// Smoothness constants of the coupled objective under the weighted norm;
// operator norms of the mixing matrices are bounded by their spectral norm.
SmoothnessConstants block_smoothness(const SaddleProblem& problem,
                                     const NormWeights& weights,
                                     const MixerRef& w_x, const MixerRef& w_y);

// Weights derived from the maps' squared diameters and the dual radii.
NormWeights default_weights(const SaddleProblem& problem, const GossipMatrix& w_x,
                            const GossipMatrix& w_y);

// Stacked operator value g(zeta): gradients for the min blocks, negated
// gradients for the max blocks, with the consensus couplings mixed in.
struct OperatorValue {
  std::vector<Vec> gx, gp, gs, gy, gq, gz;
};
OperatorValue assemble_operator(const SaddleProblem& problem, const MixerRef& w_x,
                                const MixerRef& w_y, const IterateBlock& at);

// Value of the coupled objective S(u, v) = F + <s, W_y y> + <z, W_x x>.
double saddle_value(const SaddleProblem& problem, const MixerRef& w_x,
                    const MixerRef& w_y, const IterateBlock& at);

// l2 norms of W_x x and W_y y over the stacked block.
std::pair<double, double> consensus_residual(const IterateBlock& block,
                                             const GossipMatrix& w);
// sqrt(mean_i ||x_i - mean(x)||^2): per-node deviation form of the residual
double node_deviation(const std::vector<Vec>& slices);

// Exact duality gap for supported bilinear classes; throws UnsupportedProblem
// when the problem carries no closed-form oracle.
double duality_gap_bilinear(const SaddleProblem& problem, const IterateBlock& averaged);

// Algorithm: synchronous decentralized Mirror-Prox. Each iteration performs
// two gossip exchanges and two mirror updates per variable per node; the
// ergodic average of the half-step iterates is returned.
DmpRunResult decentralized_mirror_prox(const SaddleProblem& problem,
                                       const GossipMatrix& w_x,
                                       const GossipMatrix& w_y,
                                       const EngineConfig& config);

// General Mirror-Prox over an arbitrary block structure (used directly for
// single-machine problems and as the reference the decentralized driver must
// reduce to at m = 1).
struct VIProblem {
  std::vector<MirrorMap> maps;
  std::vector<double> weights;  // empty -> all ones
  std::function<std::vector<Vec>(const std::vector<Vec>&)> op;
  std::function<double(const std::vector<Vec>&)> gap;  // optional
};

struct VIRunResult {
  std::vector<Vec> average;
  RunReport report;
};

VIRunResult mirror_prox(const VIProblem& problem, double alpha, int iterations,
                        int gap_every = 0);

}  // namespace dmp
