#include "dmp/hardcase.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dmp {

namespace {

// upper bidiagonal coupling with -2 on alternating super-diagonal slots;
// `odd_slots` selects which parity carries the -2
Mat coupling_matrix(int dim, bool odd_slots) {
  Mat a(dim, dim);
  for (int i = 0; i < dim; ++i) {
    a(i, i) = 1.0;
    if (i + 1 < dim) {
      const bool is_odd = (i % 2 == 0);  // 1-based row index parity
      if (is_odd == odd_slots) a(i, i + 1) = -2.0;
    }
  }
  return a;
}

}  // namespace

HardInstance hard_instance(double l_smooth, double eps, double radius, int dim,
                           const Graph& graph, const std::vector<int>& near_set,
                           int rho) {
  if (!(l_smooth > 0.0 && eps > 0.0 && radius > 0.0))
    throw std::invalid_argument("hard_instance: L, eps, R must be positive");
  if (dim < 4 || dim % 2 != 0)
    throw std::invalid_argument("hard_instance: dimension must be even and >= 4");
  if (rho < 1) throw std::invalid_argument("hard_instance: rho must be >= 1");
  graph.validate();
  if (near_set.empty())
    throw std::invalid_argument("hard_instance: near set must be nonempty");

  HardInstance inst;
  inst.l_smooth = l_smooth;
  inst.eps = eps;
  inst.radius = radius;
  inst.dim = dim;
  inst.graph = graph;
  inst.rho = rho;
  inst.roles.assign(graph.node_count, 0);
  for (int v : near_set) {
    if (v < 0 || v >= graph.node_count)
      throw std::invalid_argument("hard_instance: near-set node out of range");
    inst.roles[v] = 1;
  }
  const std::vector<int> dist = graph.distances_from(near_set);
  for (int v = 0; v < graph.node_count; ++v)
    if (dist[v] >= rho) inst.roles[v] = 2;
  inst.near_count = static_cast<int>(std::count(inst.roles.begin(), inst.roles.end(), 1));
  inst.far_count = static_cast<int>(std::count(inst.roles.begin(), inst.roles.end(), 2));
  if (inst.far_count == 0)
    throw std::invalid_argument("hard_instance: no node is rho hops from the near set");

  // The far set carries the even-slot coupling plus the forcing term; its
  // first super-diagonal slot is empty, so local steps there cannot unlock
  // coordinate 2. The near set carries the complementary odd-slot coupling.
  inst.a1 = coupling_matrix(dim, false);
  inst.a2 = coupling_matrix(dim, true);
  return inst;
}

Mat HardInstance::coupling_gram() const {
  Mat a(dim, dim);
  for (int i = 0; i < dim; ++i) {
    a(i, i) = 1.0;
    if (i + 1 < dim) a(i, i + 1) = -1.0;  // (a1 + a2)/2 super-diagonal
  }
  Mat g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      double s = 0.0;
      for (int k = 0; k < dim; ++k) s += a(k, i) * a(k, j);
      g(i, j) = s;
    }
  return g;
}

NodeGradients HardInstance::node_objective(int node, const Vec& x, const Vec& y) const {
  const double m = static_cast<double>(graph.node_count);
  const double quad = 16.0 * eps / (radius * radius);
  const int role = roles[node];

  NodeGradients g;
  g.gx.assign(dim, 0.0);
  g.gy.assign(dim, 0.0);

  double bilinear = 0.0;
  if (role != 0) {
    const Mat& a = role == 2 ? a1 : a2;
    const double scale =
        (role == 2 ? m / far_count : m / near_count) * l_smooth / 4.0;
    // bidiagonal product: (A y)_i = y_i + a_{i,i+1} y_{i+1}
    for (int i = 0; i < dim; ++i) {
      double ay = y[i];
      if (i + 1 < dim && a(i, i + 1) != 0.0) ay += a(i, i + 1) * y[i + 1];
      bilinear += x[i] * ay;
      g.gx[i] += scale * ay;
    }
    for (int j = 0; j < dim; ++j) {
      double atx = x[j];
      if (j > 0 && a(j - 1, j) != 0.0) atx += a(j - 1, j) * x[j - 1];
      g.gy[j] += scale * atx;
    }
    bilinear *= scale;
  }

  double value = bilinear + quad * (norm2_sq(x) - norm2_sq(y));
  for (int i = 0; i < dim; ++i) {
    g.gx[i] += 2.0 * quad * x[i];
    g.gy[i] -= 2.0 * quad * y[i];
  }
  if (role == 2) {
    const double force = (m / far_count) * l_smooth * l_smooth * radius * radius / eps;
    value -= force * y[0];
    g.gy[0] -= force;
  }
  g.value = value;
  return g;
}

double HardInstance::average_value(const Vec& x, const Vec& y) const {
  double total = 0.0;
  for (int i = 0; i < graph.node_count; ++i)
    total += node_objective(i, x, y).value;
  return total / static_cast<double>(graph.node_count);
}

SaddleProblem HardInstance::to_saddle() const {
  SaddleProblem pb;
  pb.node_count = graph.node_count;
  pb.dim_x = dim;
  pb.dim_p = 0;
  pb.dim_y = dim;
  pb.dim_q = 0;
  pb.map_x = MirrorMap::euclidean_ball(dim, radius);
  pb.map_p = MirrorMap::euclidean_unconstrained(0);
  pb.map_y = MirrorMap::euclidean_ball(dim, radius);
  pb.map_q = MirrorMap::euclidean_unconstrained(0);

  // crude but valid gradient bounds over the balls
  const double m = static_cast<double>(graph.node_count);
  const double quad = 16.0 * eps / (radius * radius);
  const double coupling =
      (far_count > 0 ? m / far_count : m) * l_smooth / 4.0 * 3.0 * radius;
  const double force = (m / std::max(far_count, 1)) * l_smooth * l_smooth *
                       radius * radius / eps;
  pb.grad_bound_x = coupling + 2.0 * quad * radius;
  pb.grad_bound_y = coupling + 2.0 * quad * radius + force;
  pb.lipschitz.min_min = 2.0 * quad;
  pb.lipschitz.max_max = 2.0 * quad;
  pb.lipschitz.min_max = (m / std::max(far_count, 1)) * l_smooth / 4.0 * 3.0;
  pb.lipschitz.max_min = pb.lipschitz.min_max;

  const HardInstance inst = *this;
  pb.oracle = [inst](int node, const Vec& x, const Vec& /*p*/, const Vec& y,
                     const Vec& /*q*/) { return inst.node_objective(node, x, y); };
  return pb;
}

SpanAuditReport span_trace_audit(const std::vector<TraceEvent>& trace, int rho,
                                 double local_cost, double comm_cost) {
  SpanAuditReport report;
  long locals = 0, comms = 0;
  report.bound_per_event.reserve(trace.size());
  for (const TraceEvent& ev : trace) {
    if (ev.type == 'C')
      ++comms;
    else
      ++locals;
    const double elapsed = local_cost * locals + comm_cost * comms;
    const double ratio =
        (elapsed - 2.0 * local_cost) / (local_cost + rho * comm_cost);
    const int bound = static_cast<int>(std::floor(ratio)) + 2;
    report.bound_per_event.push_back(bound);
    for (std::size_t i = 0; i < ev.max_nonzero_x.size(); ++i) {
      const int idx = std::max(ev.max_nonzero_x[i], ev.max_nonzero_y[i]);
      report.max_index_seen = std::max(report.max_index_seen, idx);
      if (idx > bound && report.passed) {
        report.passed = false;
        report.first_violation_event = ev.index;
        report.first_violation_node = static_cast<int>(i);
      }
    }
  }
  return report;
}

std::string trace_to_csv(const std::vector<TraceEvent>& trace) {
  std::ostringstream out;
  out << "event,node,step_type,max_nonzero_x,max_nonzero_y\n";
  for (const TraceEvent& ev : trace) {
    for (std::size_t i = 0; i < ev.max_nonzero_x.size(); ++i)
      out << ev.index << ',' << i << ',' << (ev.type == 'C' ? "comm" : "local")
          << ',' << ev.max_nonzero_x[i] << ',' << ev.max_nonzero_y[i] << '\n';
  }
  return out.str();
}

}  // namespace dmp
