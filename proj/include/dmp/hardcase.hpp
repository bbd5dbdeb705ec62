#pragma once

#include <string>
#include <vector>

#include "dmp/engine.hpp"
#include "dmp/topology.hpp"

namespace dmp {

// Worst-case bilinear instance: three-way node assignment with the two
// complementary coupling matrices, quadratic regularization on every node,
// and a first-coordinate forcing term on the far node set.
struct HardInstance {
  double l_smooth = 0.0;
  double eps = 0.0;
  double radius = 0.0;
  int dim = 0;
  Graph graph;
  std::vector<int> roles;  // 0 = plain, 1 = near set, 2 = far set
  int rho = 0;
  int near_count = 0;  // |B|
  int far_count = 0;   // |B_rho|
  Mat a1, a2;          // d x d upper bidiagonal couplings

  // Gram matrix of the averaged coupling (A^T A for A = (a1 + a2)/2);
  // tridiagonal with first diagonal entry 1.
  Mat coupling_gram() const;
  // value and gradients of node i's objective at (x, y)
  NodeGradients node_objective(int node, const Vec& x, const Vec& y) const;
  // average of the node objectives at (x, y)
  double average_value(const Vec& x, const Vec& y) const;
  // SaddleProblem over Euclidean balls of the given radius (no local blocks)
  SaddleProblem to_saddle() const;
};

// Builds the instance. `near_set` is the node subset B; the far set is every
// node at hop distance >= rho from B and must be nonempty. dim must be even
// and >= 4.
HardInstance hard_instance(double l_smooth, double eps, double radius, int dim,
                           const Graph& graph, const std::vector<int>& near_set,
                           int rho);

// Result of auditing a recorded run against the span bound: with unit local
// and communication costs, after T = t*(local steps) + tau*(comm rounds) the
// highest coordinate that may be nonzero is floor((T - 2t)/(t + rho tau)) + 2.
struct SpanAuditReport {
  bool passed = true;
  int max_index_seen = 0;        // highest nonzero coordinate over the whole run
  long first_violation_event = -1;
  int first_violation_node = -1;
  std::vector<int> bound_per_event;  // the lemma bound k at each event
};

SpanAuditReport span_trace_audit(const std::vector<TraceEvent>& trace, int rho,
                                 double local_cost = 1.0, double comm_cost = 1.0);

// Trace serialization: "event,node,step_type,max_nonzero_x,max_nonzero_y".
std::string trace_to_csv(const std::vector<TraceEvent>& trace);

}  // namespace dmp
