#include "dmp/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace dmp {

namespace {

constexpr double kAuditZeroGuard = 1e-300;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int max_nonzero_index(const Vec& v) {
  for (int i = static_cast<int>(v.size()) - 1; i >= 0; --i)
    if (std::fabs(v[i]) > kAuditZeroGuard) return i + 1;
  return 0;
}

}  // namespace

IterateBlock IterateBlock::zeros(int m, int dx, int dp, int dy, int dq) {
  IterateBlock b;
  b.x.assign(m, Vec(dx, 0.0));
  b.p.assign(m, Vec(dp, 0.0));
  b.s.assign(m, Vec(dy, 0.0));
  b.y.assign(m, Vec(dy, 0.0));
  b.q.assign(m, Vec(dq, 0.0));
  b.z.assign(m, Vec(dx, 0.0));
  return b;
}

void IterateBlock::scale(double factor) {
  for (auto* grp : {&x, &p, &s, &y, &q, &z})
    for (auto& slice : *grp)
      for (auto& v : slice) v *= factor;
}

void IterateBlock::accumulate(const IterateBlock& other) {
  auto add = [](std::vector<Vec>& a, const std::vector<Vec>& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < a[i].size(); ++j) a[i][j] += b[i][j];
  };
  add(x, other.x);
  add(p, other.p);
  add(s, other.s);
  add(y, other.y);
  add(q, other.q);
  add(z, other.z);
}

bool IterateBlock::finite() const {
  for (const auto* grp : {&x, &p, &s, &y, &q, &z})
    for (const auto& slice : *grp)
      if (!all_finite(slice)) return false;
  return true;
}

IterateBlock SaddleProblem::initial_block() const {
  IterateBlock b = IterateBlock::zeros(node_count, dim_x, dim_p, dim_y, dim_q);
  for (int i = 0; i < node_count; ++i) {
    if (dim_x > 0) b.x[i] = map_x.prox_center();
    if (dim_p > 0) b.p[i] = map_p.prox_center();
    if (dim_y > 0) b.y[i] = map_y.prox_center();
    if (dim_q > 0) b.q[i] = map_q.prox_center();
  }
  return b;
}

std::pair<double, double> dual_radii(double grad_bound_x, double grad_bound_y,
                                     const GossipMatrix& w, int node_count) {
  if (grad_bound_x < 0.0 || grad_bound_y < 0.0)
    throw std::invalid_argument("dual_radii: gradient bounds must be >= 0");
  if (!(w.lambda_min_pos > 0.0))
    throw std::invalid_argument("dual_radii: matrix has no positive spectrum");
  const double m = static_cast<double>(node_count);
  const double rz =
      std::sqrt(2.0 * m) * grad_bound_x / w.lambda_min_pos;
  const double rs =
      std::sqrt(2.0 * m) * grad_bound_y / w.lambda_min_pos;
  return {rz, rs};
}

double combine_lipschitz(double l_uu, double l_uv, double l_vu, double l_vv) {
  for (double v : {l_uu, l_uv, l_vu, l_vv})
    if (v < 0.0) throw std::invalid_argument("combine_lipschitz: negative constant");
  return 2.0 * std::max({l_uu, l_uv, l_vu, l_vv});
}

SmoothnessConstants block_smoothness(const SaddleProblem& problem,
                                     const NormWeights& weights,
                                     const MixerRef& w_x, const MixerRef& w_y) {
  const double r2_min = weights.x + weights.p;
  const double r2_max = weights.y + weights.q;
  const double cross_x =
      std::sqrt(weights.x) * std::sqrt(weights.z) * w_x.lambda_max();
  const double cross_y =
      std::sqrt(weights.y) * std::sqrt(weights.s) * w_y.lambda_max();
  SmoothnessConstants c;
  c.l_uu = problem.lipschitz.min_min * r2_min;
  c.l_vv = problem.lipschitz.max_max * r2_max;
  const double coupled = std::sqrt(r2_min * r2_max);
  c.l_uv = std::sqrt(2.0) *
           (problem.lipschitz.min_max * coupled + cross_x + cross_y);
  c.l_vu = std::sqrt(2.0) *
           (problem.lipschitz.max_min * coupled + cross_x + cross_y);
  return c;
}

NormWeights default_weights(const SaddleProblem& problem, const GossipMatrix& w_x,
                            const GossipMatrix& w_y) {
  NormWeights w;
  const double m = static_cast<double>(problem.node_count);
  if (problem.dim_x > 0) w.x = m * problem.map_x.diameter_sq();
  if (problem.dim_p > 0) w.p = m * problem.map_p.diameter_sq();
  if (problem.dim_y > 0) w.y = m * problem.map_y.diameter_sq();
  if (problem.dim_q > 0) w.q = m * problem.map_q.diameter_sq();
  if (problem.node_count > 1) {
    auto [rz, rs] = dual_radii(problem.grad_bound_x, problem.grad_bound_y, w_x,
                               problem.node_count);
    if (problem.dim_x > 0) w.z = rz * rz;
    if (problem.dim_y > 0) w.s = rs * rs;
    // distinct matrices: the s radius comes from w_y's spectrum
    if (problem.dim_y > 0 && &w_y != &w_x) {
      auto [rz2, rs2] = dual_radii(problem.grad_bound_x, problem.grad_bound_y,
                                   w_y, problem.node_count);
      (void)rz2;
      w.s = rs2 * rs2;
    }
  }
  for (double v : {w.x, w.p, w.y, w.q})
    if (std::isinf(v))
      throw std::invalid_argument(
          "default_weights: primal feasible sets must be bounded");
  return w;
}

OperatorValue assemble_operator(const SaddleProblem& problem, const MixerRef& w_x,
                                const MixerRef& w_y, const IterateBlock& at) {
  const int m = problem.node_count;
  OperatorValue g;
  g.gx.resize(m);
  g.gp.resize(m);
  g.gy.resize(m);
  g.gq.resize(m);
  std::vector<Vec> wx_z, wy_s, wy_y, wx_x;
  w_x.apply(at.z, wx_z);
  w_y.apply(at.s, wy_s);
  w_y.apply(at.y, wy_y);
  w_x.apply(at.x, wx_x);
  for (int i = 0; i < m; ++i) {
    NodeGradients ng = problem.oracle(i, at.x[i], at.p[i], at.y[i], at.q[i]);
    g.gx[i] = std::move(ng.gx);
    for (int k = 0; k < problem.dim_x; ++k) g.gx[i][k] += wx_z[i][k];
    g.gp[i] = std::move(ng.gp);
    g.gy[i] = std::move(ng.gy);
    for (int k = 0; k < problem.dim_y; ++k) g.gy[i][k] = -g.gy[i][k] - wy_s[i][k];
    g.gq[i] = std::move(ng.gq);
    for (auto& v : g.gq[i]) v = -v;
  }
  g.gs = std::move(wy_y);
  g.gz = std::move(wx_x);
  for (auto& slice : g.gz)
    for (auto& v : slice) v = -v;
  return g;
}

double saddle_value(const SaddleProblem& problem, const MixerRef& w_x,
                    const MixerRef& w_y, const IterateBlock& at) {
  double total = 0.0;
  for (int i = 0; i < problem.node_count; ++i)
    total += problem.oracle(i, at.x[i], at.p[i], at.y[i], at.q[i]).value;
  std::vector<Vec> wx_x, wy_y;
  w_x.apply(at.x, wx_x);
  w_y.apply(at.y, wy_y);
  for (int i = 0; i < problem.node_count; ++i) {
    total += dot(at.z[i], wx_x[i]);
    total += dot(at.s[i], wy_y[i]);
  }
  return total;
}

std::pair<double, double> consensus_residual(const IterateBlock& block,
                                             const GossipMatrix& w) {
  std::vector<Vec> wx, wy;
  double rx = 0.0, ry = 0.0;
  if (!block.x.empty() && !block.x[0].empty()) {
    w.apply(block.x, wx);
    for (const auto& v : wx) rx += norm2_sq(v);
  }
  if (!block.y.empty() && !block.y[0].empty()) {
    w.apply(block.y, wy);
    for (const auto& v : wy) ry += norm2_sq(v);
  }
  return {std::sqrt(rx), std::sqrt(ry)};
}

double node_deviation(const std::vector<Vec>& slices) {
  if (slices.empty() || slices[0].empty()) return 0.0;
  const std::size_t d = slices[0].size();
  Vec mean(d, 0.0);
  for (const auto& s : slices)
    for (std::size_t k = 0; k < d; ++k) mean[k] += s[k];
  for (auto& v : mean) v /= static_cast<double>(slices.size());
  double acc = 0.0;
  for (const auto& s : slices)
    for (std::size_t k = 0; k < d; ++k) {
      const double diff = s[k] - mean[k];
      acc += diff * diff;
    }
  return std::sqrt(acc / static_cast<double>(slices.size()));
}

double duality_gap_bilinear(const SaddleProblem& problem,
                            const IterateBlock& averaged) {
  if (!problem.gap_oracle)
    throw UnsupportedProblem(
        "duality_gap_bilinear: no closed-form gap for this problem class");
  return problem.gap_oracle(problem, averaged);
}

std::string RunReport::to_csv() const {
  std::ostringstream out;
  out << "iter,gap,consensus_x,consensus_y,comm_rounds,oracle_calls\n";
  for (const auto& r : rows) {
    out << r.iter << ',';
    if (r.has_gap) out << format_double(r.gap);
    out << ',' << format_double(r.consensus_x) << ',' << format_double(r.consensus_y)
        << ',' << r.comm_rounds << ',' << r.oracle_calls << '\n';
  }
  return out.str();
}

namespace {

struct StepScales {
  double x, p, s, y, q, z;
};

void half_or_full_updates(const SaddleProblem& pb, const StepScales& sc,
                          const IterateBlock& center, const IterateBlock& grad_at,
                          const std::vector<Vec>& xt, const std::vector<Vec>& st,
                          const std::vector<Vec>& yt, const std::vector<Vec>& zt,
                          IterateBlock& out, long& oracle_calls) {
  const int m = pb.node_count;
  Vec dir;
  for (int i = 0; i < m; ++i) {
    NodeGradients ng =
        pb.oracle(i, grad_at.x[i], grad_at.p[i], grad_at.y[i], grad_at.q[i]);
    ++oracle_calls;
    if (pb.dim_x > 0) {
      dir = ng.gx;
      for (int k = 0; k < pb.dim_x; ++k) dir[k] = sc.x * (dir[k] + zt[i][k]);
      out.x[i] = mirror_step(pb.map_x, dir, center.x[i]);
    }
    if (pb.dim_p > 0) {
      dir = ng.gp;
      for (auto& v : dir) v *= sc.p;
      out.p[i] = mirror_step(pb.map_p, dir, center.p[i]);
    }
    if (pb.dim_y > 0) {
      // s-step direction is the mixed y; the s-block is plain Euclidean
      for (int k = 0; k < pb.dim_y; ++k)
        out.s[i][k] = center.s[i][k] - sc.s * yt[i][k];
      dir = ng.gy;
      for (int k = 0; k < pb.dim_y; ++k) dir[k] = -sc.y * (dir[k] + st[i][k]);
      out.y[i] = mirror_step(pb.map_y, dir, center.y[i]);
    }
    if (pb.dim_q > 0) {
      dir = ng.gq;
      for (auto& v : dir) v = -sc.q * v;
      out.q[i] = mirror_step(pb.map_q, dir, center.q[i]);
    }
    if (pb.dim_x > 0) {
      for (int k = 0; k < pb.dim_x; ++k)
        out.z[i][k] = center.z[i][k] + sc.z * xt[i][k];
    }
  }
}

void push_trace(std::vector<TraceEvent>& trace, char type, const IterateBlock& b) {
  TraceEvent ev;
  ev.index = static_cast<long>(trace.size());
  ev.type = type;
  const int m = static_cast<int>(b.x.size());
  ev.max_nonzero_x.resize(m);
  ev.max_nonzero_y.resize(m);
  for (int i = 0; i < m; ++i) {
    // dual slices carry mixed copies of the same coordinates, so they count
    // toward the span of their primal side
    ev.max_nonzero_x[i] = std::max(max_nonzero_index(b.x[i]), max_nonzero_index(b.z[i]));
    ev.max_nonzero_y[i] = std::max(max_nonzero_index(b.y[i]), max_nonzero_index(b.s[i]));
  }
  trace.push_back(std::move(ev));
}

}  // namespace

DmpRunResult decentralized_mirror_prox(const SaddleProblem& problem,
                                       const GossipMatrix& w_x,
                                       const GossipMatrix& w_y,
                                       const EngineConfig& config) {
  if (config.iterations <= 0)
    throw std::invalid_argument("engine: iteration count must be positive");
  if (w_x.size() != problem.node_count || w_y.size() != problem.node_count)
    throw std::invalid_argument("engine: matrix size does not match node count");

  // optional Chebyshev acceleration replaces every matrix application
  std::optional<ChebyshevMixer> cheb_x, cheb_y;
  if (config.chebyshev_degree != 0) {
    const int kx = config.chebyshev_degree > 0 ? config.chebyshev_degree
                                               : default_chebyshev_degree(w_x);
    const int ky = config.chebyshev_degree > 0 ? config.chebyshev_degree
                                               : default_chebyshev_degree(w_y);
    cheb_x = chebyshev_mixer(w_x, kx);
    cheb_y = chebyshev_mixer(w_y, ky);
  }
  const MixerRef mx = cheb_x ? MixerRef(*cheb_x) : MixerRef(w_x);
  const MixerRef my = cheb_y ? MixerRef(*cheb_y) : MixerRef(w_y);

  NormWeights weights = config.weights;
  const bool weights_unset = weights.x == 0.0 && weights.p == 0.0 &&
                             weights.y == 0.0 && weights.q == 0.0 &&
                             weights.s == 0.0 && weights.z == 0.0;
  if (weights_unset) {
    weights = default_weights(problem, w_x, w_y);
    if (cheb_x) {
      // dual radii follow the effective spectrum of the accelerated operator
      if (problem.dim_x > 0 && mx.lambda_min_pos() > 0.0) {
        const double rz = std::sqrt(2.0 * problem.node_count) *
                          problem.grad_bound_x / mx.lambda_min_pos();
        weights.z = rz * rz;
      }
      if (problem.dim_y > 0 && my.lambda_min_pos() > 0.0) {
        const double rs = std::sqrt(2.0 * problem.node_count) *
                          problem.grad_bound_y / my.lambda_min_pos();
        weights.s = rs * rs;
      }
    }
  }

  double alpha = config.alpha;
  if (alpha == 0.0) {
    const SmoothnessConstants c = block_smoothness(problem, weights, mx, my);
    const double l_zeta = combine_lipschitz(c.l_uu, c.l_uv, c.l_vu, c.l_vv);
    if (!(l_zeta > 0.0))
      throw std::invalid_argument("engine: cannot auto-configure alpha, L_zeta = 0");
    alpha = 1.0 / l_zeta;
  }

  const StepScales scales{alpha * weights.x, alpha * weights.p, alpha * weights.s,
                          alpha * weights.y, alpha * weights.q, alpha * weights.z};

  const int m = problem.node_count;
  const long n_iter = config.iterations;
  const int gap_every =
      config.gap_every > 0
          ? config.gap_every
          : static_cast<int>((n_iter + 99) / 100);
  const int row_every = std::max(1, config.row_every);

  IterateBlock cur = config.initial ? *config.initial : problem.initial_block();
  IterateBlock half = IterateBlock::zeros(m, problem.dim_x, problem.dim_p,
                                          problem.dim_y, problem.dim_q);
  IterateBlock next = half;
  IterateBlock avg_sum = half;

  DmpRunResult result;
  RunReport& report = result.report;
  long comm_rounds = 0, oracle_calls = 0;

  std::vector<Vec> xt, st, yt, zt, xth, sth, yth, zth;
  if (config.record_trace) push_trace(result.trace, 'L', cur);

  for (long k = 0; k < n_iter; ++k) {
    // one synchronous exchange carries all four mixed vectors
    mx.apply(cur.x, xt);
    my.apply(cur.s, st);
    my.apply(cur.y, yt);
    mx.apply(cur.z, zt);
    comm_rounds += std::max(mx.rounds(), my.rounds());
    if (config.record_trace) push_trace(result.trace, 'C', cur);

    half_or_full_updates(problem, scales, cur, cur, xt, st, yt, zt, half,
                         oracle_calls);
    if (config.record_trace) push_trace(result.trace, 'L', half);

    mx.apply(half.x, xth);
    my.apply(half.s, sth);
    my.apply(half.y, yth);
    mx.apply(half.z, zth);
    comm_rounds += std::max(mx.rounds(), my.rounds());
    if (config.record_trace) push_trace(result.trace, 'C', half);

    half_or_full_updates(problem, scales, cur, half, xth, sth, yth, zth, next,
                         oracle_calls);
    cur = next;
    if (config.record_trace) push_trace(result.trace, 'L', cur);

    if (!half.finite() || !cur.finite())
      throw NumericFailure("engine: non-finite iterate at iteration " +
                           std::to_string(k));

    avg_sum.accumulate(half);

    const long done = k + 1;
    const bool last = done == n_iter;
    if (done % row_every == 0 || last) {
      IterateBlock avg = avg_sum;
      avg.scale(1.0 / static_cast<double>(done));
      ReportRow row;
      row.iter = done;
      auto [cx, cy] = consensus_residual(avg, w_x);
      if (&w_y != &w_x && problem.dim_y > 0) {
        auto [cx2, cy2] = consensus_residual(avg, w_y);
        (void)cx2;
        cy = cy2;
      }
      row.consensus_x = cx;
      row.consensus_y = cy;
      row.comm_rounds = comm_rounds;
      row.oracle_calls = oracle_calls;
      if (problem.gap_oracle && (done % gap_every == 0 || last)) {
        row.has_gap = true;
        row.gap = problem.gap_oracle(problem, avg);
      }
      report.rows.push_back(row);
      if (last) {
        report.final_consensus_x = row.consensus_x;
        report.final_consensus_y = row.consensus_y;
        if (row.has_gap) report.final_gap = row.gap;
      }
    }
  }

  avg_sum.scale(1.0 / static_cast<double>(n_iter));
  result.averages = std::move(avg_sum);
  report.total_comm_rounds = comm_rounds;
  report.total_oracle_calls = oracle_calls;
  return result;
}

VIRunResult mirror_prox(const VIProblem& problem, double alpha, int iterations,
                        int gap_every) {
  if (iterations <= 0)
    throw std::invalid_argument("mirror_prox: iteration count must be positive");
  const std::size_t blocks = problem.maps.size();
  std::vector<double> weights = problem.weights;
  if (weights.empty()) weights.assign(blocks, 1.0);

  std::vector<Vec> cur(blocks), half(blocks), avg(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    cur[b] = problem.maps[b].prox_center();
    avg[b] = Vec(cur[b].size(), 0.0);
  }

  VIRunResult result;
  const int cadence = gap_every > 0 ? gap_every : std::max(1, (iterations + 99) / 100);

  for (int k = 0; k < iterations; ++k) {
    std::vector<Vec> g = problem.op(cur);
    for (std::size_t b = 0; b < blocks; ++b) {
      Vec dir = g[b];
      for (auto& v : dir) v *= alpha * weights[b];
      half[b] = mirror_step(problem.maps[b], dir, cur[b]);
    }
    std::vector<Vec> gh = problem.op(half);
    for (std::size_t b = 0; b < blocks; ++b) {
      Vec dir = gh[b];
      for (auto& v : dir) v *= alpha * weights[b];
      cur[b] = mirror_step(problem.maps[b], dir, cur[b]);
      if (!all_finite(cur[b]))
        throw NumericFailure("mirror_prox: non-finite iterate at iteration " +
                             std::to_string(k));
      for (std::size_t j = 0; j < avg[b].size(); ++j) avg[b][j] += half[b][j];
    }
    if (problem.gap && ((k + 1) % cadence == 0 || k + 1 == iterations)) {
      std::vector<Vec> mean = avg;
      for (auto& blk : mean)
        for (auto& v : blk) v /= static_cast<double>(k + 1);
      ReportRow row;
      row.iter = k + 1;
      row.has_gap = true;
      row.gap = problem.gap(mean);
      row.oracle_calls = 2L * (k + 1);
      result.report.rows.push_back(row);
      if (k + 1 == iterations) result.report.final_gap = row.gap;
    }
  }
  for (auto& blk : avg)
    for (auto& v : blk) v /= static_cast<double>(iterations);
  result.average = std::move(avg);
  result.report.total_oracle_calls = 2L * iterations;
  return result;
}

}  // namespace dmp
