#include "dmp/wb.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dmp {

namespace {
constexpr double kMarginalTol = 1e-8;

void check_simplex(const Vec& v, const char* what) {
  double sum = 0.0;
  for (double x : v) {
    if (x < -1e-12) throw std::invalid_argument(std::string(what) + ": negative mass");
    sum += x;
  }
  if (std::fabs(sum - 1.0) > kMarginalTol)
    throw std::invalid_argument(std::string(what) + ": mass does not sum to 1");
}
}  // namespace

WbInstance WbInstance::create(Mat cost, std::vector<Vec> measures) {
  WbInstance inst;
  inst.n = cost.rows;
  inst.m = static_cast<int>(measures.size());
  inst.cost = std::move(cost);
  inst.measures = std::move(measures);
  inst.d.resize(static_cast<std::size_t>(inst.n) * inst.n);
  for (int i = 0; i < inst.n; ++i)
    for (int j = 0; j < inst.n; ++j) inst.d[i * inst.n + j] = inst.cost(i, j);
  inst.max_cost = norm_inf(inst.d);
  inst.validate();
  return inst;
}

void WbInstance::validate() const {
  if (n < 1) throw std::invalid_argument("wb instance: support size must be >= 1");
  if (cost.rows != n || cost.cols != n)
    throw std::invalid_argument("wb instance: cost matrix must be n x n");
  for (double c : cost.a)
    if (c < 0.0 || !std::isfinite(c))
      throw std::invalid_argument("wb instance: cost entries must be finite and >= 0");
  if (m < 1) throw std::invalid_argument("wb instance: need at least one measure");
  for (const Vec& y : measures) {
    if (static_cast<int>(y.size()) != n)
      throw std::invalid_argument("wb instance: measure dimension mismatch");
    check_simplex(y, "wb measure");
  }
}

Mat incidence_matrix(int n) {
  if (n < 1) throw std::invalid_argument("incidence_matrix: n must be >= 1");
  Mat a(2 * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      a(i, i * n + j) = 1.0;      // row marginal
      a(n + j, i * n + j) = 1.0;  // column marginal
    }
  return a;
}

Vec apply_incidence(int n, const Vec& plan) {
  Vec out(2 * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double v = plan[i * n + j];
      out[i] += v;
      out[n + j] += v;
    }
  return out;
}

Vec apply_incidence_t(int n, const Vec& dual) {
  Vec out(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[i * n + j] = dual[i] + dual[n + j];
  return out;
}

OtResult ot_lp_oracle(const Mat& cost, const Vec& p, const Vec& q) {
  const int n = cost.rows;
  if (static_cast<int>(p.size()) != n || static_cast<int>(q.size()) != n)
    throw std::invalid_argument("ot_lp_oracle: marginal dimension mismatch");
  check_simplex(p, "ot marginal p");
  check_simplex(q, "ot marginal q");
  double sp = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    sp += p[i];
    sq += q[i];
  }
  if (std::fabs(sp - sq) > kMarginalTol)
    throw std::invalid_argument("ot_lp_oracle: marginal masses differ");

  // transportation LP with the redundant last column-constraint dropped
  LpProblem lp;
  lp.e = Mat(2 * n - 1, n * n);
  lp.b.assign(2 * n - 1, 0.0);
  lp.c.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      lp.e(i, i * n + j) = 1.0;
      if (j < n - 1) lp.e(n + j, i * n + j) = 1.0;
      lp.c[i * n + j] = cost(i, j);
    }
  for (int i = 0; i < n; ++i) lp.b[i] = p[i];
  for (int j = 0; j < n - 1; ++j) lp.b[n + j] = q[j];

  LpSolution sol = solve_lp(lp);
  if (!sol.feasible) throw std::invalid_argument("ot_lp_oracle: infeasible marginals");
  return {sol.value, std::move(sol.v)};
}

double wb_objective(const WbInstance& instance, const Vec& x) {
  double total = 0.0;
  for (const Vec& y : instance.measures)
    total += ot_lp_oracle(instance.cost, x, y).value;
  return total / static_cast<double>(instance.m);
}

double barycenter_lp(const WbInstance& instance, Vec* x_out) {
  const int n = instance.n;
  const int m = instance.m;
  const int plan_vars = n * n;
  const int cols = n + m * plan_vars;
  const int rows = 2 * n * m + 1;

  LpProblem lp;
  lp.e = Mat(rows, cols);
  lp.b.assign(rows, 0.0);
  lp.c.assign(cols, 0.0);
  for (int i = 0; i < m; ++i) {
    const int col0 = n + i * plan_vars;
    const int row0 = 2 * n * i;
    for (int r = 0; r < n; ++r)
      for (int cidx = 0; cidx < n; ++cidx) {
        lp.e(row0 + r, col0 + r * n + cidx) = 1.0;          // row marginal = x
        lp.e(row0 + n + cidx, col0 + r * n + cidx) = 1.0;   // column marginal = y_i
      }
    for (int r = 0; r < n; ++r) {
      lp.e(row0 + r, r) = -1.0;
      lp.b[row0 + n + r] = instance.measures[i][r];
    }
    for (int k = 0; k < plan_vars; ++k) lp.c[col0 + k] = instance.d[k];
  }
  for (int r = 0; r < n; ++r) lp.e(rows - 1, r) = 1.0;
  lp.b[rows - 1] = 1.0;

  LpSolution sol = solve_lp(lp);
  if (!sol.feasible) throw NumericFailure("barycenter_lp: infeasible joint program");
  if (x_out) x_out->assign(sol.v.begin(), sol.v.begin() + n);
  return sol.value / static_cast<double>(m);
}

double penalized_transport_lp(const WbInstance& instance, const Vec& x, const Vec& y) {
  const int n = instance.n;
  // min d.p + 2 maxC 1.(r+ + r-)  s.t.  A p - r+ + r- = b,  1.p = 1
  const int plan_vars = n * n;
  const int cols = plan_vars + 4 * n;
  LpProblem lp;
  lp.e = Mat(2 * n + 1, cols);
  lp.b.assign(2 * n + 1, 0.0);
  lp.c.assign(cols, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      lp.e(i, i * n + j) = 1.0;
      lp.e(n + j, i * n + j) = 1.0;
      lp.c[i * n + j] = instance.d[i * n + j];
    }
  for (int r = 0; r < 2 * n; ++r) {
    lp.e(r, plan_vars + r) = -1.0;          // r+
    lp.e(r, plan_vars + 2 * n + r) = 1.0;   // r-
    lp.c[plan_vars + r] = 2.0 * instance.max_cost;
    lp.c[plan_vars + 2 * n + r] = 2.0 * instance.max_cost;
    lp.b[r] = r < n ? x[r] : y[r - n];
  }
  for (int k = 0; k < plan_vars; ++k) lp.e(2 * n, k) = 1.0;
  lp.b[2 * n] = 1.0;
  LpSolution sol = solve_lp(lp);
  if (!sol.feasible) throw NumericFailure("penalized_transport_lp: infeasible");
  return sol.value;
}

SaddleProblem build_wb_saddle(const WbInstance& instance, const GossipMatrix& w) {
  instance.validate();
  if (w.size() != instance.m)
    throw std::invalid_argument("build_wb_saddle: matrix size must equal measure count");
  const int n = instance.n;
  const double two_max_c = 2.0 * instance.max_cost;

  SaddleProblem pb;
  pb.node_count = instance.m;
  pb.dim_x = n;
  pb.dim_p = n * n;
  pb.dim_y = 0;
  pb.dim_q = 2 * n;
  pb.map_x = MirrorMap::entropic_simplex(n);
  pb.map_p = MirrorMap::entropic_simplex(n * n);
  pb.map_y = MirrorMap::euclidean_unconstrained(0);
  pb.map_q = MirrorMap::euclidean_box(2 * n, -1.0, 1.0);
  pb.grad_bound_x = two_max_c * std::sqrt(static_cast<double>(n));
  pb.grad_bound_y = 0.0;
  pb.lipschitz.min_max = 2.0 * std::sqrt(2.0) * instance.max_cost;
  pb.lipschitz.max_min = pb.lipschitz.min_max;

  const WbInstance inst = instance;  // captured by value; immutable
  pb.oracle = [inst, n, two_max_c](int node, const Vec& x, const Vec& p,
                                   const Vec& /*y*/, const Vec& q) {
    NodeGradients g;
    Vec ap = apply_incidence(n, p);
    Vec b(2 * n);
    for (int k = 0; k < n; ++k) {
      b[k] = x[k];
      b[n + k] = inst.measures[node][k];
    }
    g.value = dot(inst.d, p) + two_max_c * (dot(q, ap) - dot(b, q));
    g.gx.assign(n, 0.0);
    for (int k = 0; k < n; ++k) g.gx[k] = -two_max_c * q[k];
    g.gp = apply_incidence_t(n, q);
    for (std::size_t k = 0; k < g.gp.size(); ++k)
      g.gp[k] = inst.d[k] + two_max_c * g.gp[k];
    g.gy.clear();
    g.gq = ap;
    for (int k = 0; k < 2 * n; ++k) g.gq[k] = two_max_c * (ap[k] - b[k]);
    return g;
  };

  pb.gap_oracle = [inst](const SaddleProblem& p_, const IterateBlock& block) {
    Vec x_av(inst.n, 0.0);
    for (const Vec& xi : block.x)
      for (int k = 0; k < inst.n; ++k) x_av[k] += xi[k];
    for (double& v : x_av) v /= static_cast<double>(p_.node_count);
    return wb_gap(inst, x_av, block.p, block.q) / static_cast<double>(inst.m);
  };
  return pb;
}

double wb_gap(const WbInstance& instance, const Vec& x_av,
              const std::vector<Vec>& p_hat, const std::vector<Vec>& q_hat) {
  const int n = instance.n;
  const int m = instance.m;
  if (static_cast<int>(p_hat.size()) != m || static_cast<int>(q_hat.size()) != m)
    throw std::invalid_argument("wb_gap: need one plan and one dual per measure");
  check_simplex(x_av, "wb_gap barycenter");
  const double two_max_c = 2.0 * instance.max_cost;

  // max side: inner max over the box in closed form
  double max_side = 0.0;
  for (int i = 0; i < m; ++i) {
    check_simplex(p_hat[i], "wb_gap plan");
    Vec resid = apply_incidence(n, p_hat[i]);
    for (int k = 0; k < n; ++k) {
      resid[k] -= x_av[k];
      resid[n + k] -= instance.measures[i][k];
    }
    max_side += dot(instance.d, p_hat[i]) + two_max_c * norm1(resid);
  }

  // min side: linear in (x, p) at fixed duals; minimize each plan over its
  // simplex and the shared barycenter over its simplex
  double min_side = 0.0;
  Vec x_coeff(n, 0.0);
  for (int i = 0; i < m; ++i) {
    const Vec& q = q_hat[i];
    if (static_cast<int>(q.size()) != 2 * n)
      throw std::invalid_argument("wb_gap: dual dimension mismatch");
    Vec lin = apply_incidence_t(n, q);
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n * n; ++k)
      best = std::min(best, instance.d[k] + two_max_c * lin[k]);
    min_side += best;
    for (int k = 0; k < n; ++k) x_coeff[k] -= two_max_c * q[k];
    for (int k = 0; k < n; ++k)
      min_side -= two_max_c * q[n + k] * instance.measures[i][k];
  }
  min_side += *std::min_element(x_coeff.begin(), x_coeff.end());

  return max_side - min_side;
}

WbSolverConfig WbSolverConfig::from_instance(const WbInstance& instance,
                                             const MixerRef& w, int iterations) {
  if (iterations <= 0)
    throw std::invalid_argument("wb config: iteration count must be positive");
  if (!(instance.max_cost > 0.0))
    throw std::invalid_argument("wb config: cost matrix must have a positive entry");
  const double n = instance.n;
  const double m = instance.m;
  const double max_c = instance.max_cost;
  const double chi = w.chi();
  const double lmin = w.lambda_min_pos();
  if (!(lmin > 0.0))
    throw std::invalid_argument("wb config: communication matrix has empty positive spectrum");
  const double ln_n = std::log(std::max(n, 2.0));  // guard n = 1 degeneracy

  WbSolverConfig cfg;
  cfg.alpha = 1.0 / (16.0 * m * std::sqrt(2.0 * n * ln_n) * max_c * chi);
  cfg.eta = cfg.alpha * m * n * max_c * max_c * max_c / (lmin * lmin);
  cfg.beta = 6.0 * cfg.alpha * m * ln_n;
  cfg.theta = 2.0 * cfg.alpha * m * n * max_c * max_c / (lmin * lmin);
  cfg.iterations = iterations;
  return cfg;
}

WbRunResult dmp_wb_run(const WbInstance& instance, const MixerRef& w,
                       const WbSolverConfig& config) {
  instance.validate();
  const int n = instance.n;
  const int m = instance.m;
  if (w.size() != m)
    throw std::invalid_argument("dmp_wb_run: matrix size must equal measure count");
  if (config.iterations <= 0 || !(config.beta > 0.0))
    throw std::invalid_argument("dmp_wb_run: config not initialized");

  const double two_max_c = 2.0 * instance.max_cost;
  const MirrorMap map_x = MirrorMap::entropic_simplex(n);
  const MirrorMap map_p = MirrorMap::entropic_simplex(n * n);
  const MirrorMap map_q = MirrorMap::euclidean_box(2 * n, -1.0, 1.0);

  std::vector<Vec> x(m, map_x.prox_center()), p(m, map_p.prox_center());
  std::vector<Vec> q(m, Vec(2 * n, 0.0)), z(m, Vec(n, 0.0));
  std::vector<Vec> xh(m), ph(m), qh(m), zh(m);
  std::vector<Vec> sum_x(m, Vec(n, 0.0)), sum_p(m, Vec(n * n, 0.0)),
      sum_q(m, Vec(2 * n, 0.0));
  std::vector<Vec> wz, wx, wzh, wxh;

  WbRunResult result;
  RunReport& report = result.report;
  long comm_rounds = 0, oracle_calls = 0;
  const long n_iter = config.iterations;
  const int gap_every = config.gap_every > 0
                            ? config.gap_every
                            : static_cast<int>((n_iter + 99) / 100);
  const int row_every = std::max(1, config.row_every);

  Vec dir_p(n * n), dir_x(n), dir_q(2 * n), b(2 * n);
  auto plan_dir = [&](const Vec& dual) {
    Vec at = apply_incidence_t(n, dual);
    for (int k = 0; k < n * n; ++k)
      dir_p[k] = config.beta * (instance.d[k] + two_max_c * at[k]);
  };

  for (long it = 0; it < n_iter; ++it) {
    // first exchange: mixes the dual z and the barycenter copies x
    w.apply(z, wz);
    w.apply(x, wx);
    comm_rounds += w.rounds();

    for (int i = 0; i < m; ++i) {
      plan_dir(q[i]);
      ph[i] = mirror_step(map_p, dir_p, p[i]);
      for (int k = 0; k < n; ++k)
        dir_x[k] = -config.beta * (q[i][k] - wz[i][k]);
      xh[i] = mirror_step(map_x, dir_x, x[i]);
      Vec ap = apply_incidence(n, p[i]);
      for (int k = 0; k < n; ++k) {
        b[k] = x[i][k];
        b[n + k] = instance.measures[i][k];
      }
      for (int k = 0; k < 2 * n; ++k)
        dir_q[k] = -config.eta * (ap[k] - b[k]);
      qh[i] = mirror_step(map_q, dir_q, q[i]);
      zh[i] = z[i];
      for (int k = 0; k < n; ++k) zh[i][k] += config.theta * wx[i][k];
      ++oracle_calls;
    }

    // second exchange: mixes the half-step dual and barycenter copies
    w.apply(zh, wzh);
    w.apply(xh, wxh);
    comm_rounds += w.rounds();

    for (int i = 0; i < m; ++i) {
      plan_dir(qh[i]);
      Vec p_next = mirror_step(map_p, dir_p, p[i]);
      for (int k = 0; k < n; ++k)
        dir_x[k] = -config.beta * (qh[i][k] - wzh[i][k]);
      Vec x_next = mirror_step(map_x, dir_x, x[i]);
      Vec ap = apply_incidence(n, ph[i]);
      for (int k = 0; k < n; ++k) {
        b[k] = xh[i][k];
        b[n + k] = instance.measures[i][k];
      }
      for (int k = 0; k < 2 * n; ++k)
        dir_q[k] = -config.eta * (ap[k] - b[k]);
      Vec q_next = mirror_step(map_q, dir_q, q[i]);
      for (int k = 0; k < n; ++k) z[i][k] += config.theta * wxh[i][k];
      p[i] = std::move(p_next);
      x[i] = std::move(x_next);
      q[i] = std::move(q_next);
      ++oracle_calls;
      for (int k = 0; k < n; ++k) sum_x[i][k] += xh[i][k];
      for (int k = 0; k < n * n; ++k) sum_p[i][k] += ph[i][k];
      for (int k = 0; k < 2 * n; ++k) sum_q[i][k] += qh[i][k];
      if (!all_finite(x[i]) || !all_finite(z[i]))
        throw NumericFailure("dmp_wb_run: non-finite iterate at iteration " +
                             std::to_string(it));
    }

    const long done = it + 1;
    const bool last = done == n_iter;
    if (done % row_every == 0 || last) {
      const double inv = 1.0 / static_cast<double>(done);
      std::vector<Vec> avg_x(m, Vec(n));
      for (int i = 0; i < m; ++i)
        for (int k = 0; k < n; ++k) avg_x[i][k] = sum_x[i][k] * inv;
      std::vector<Vec> wavg;
      w.apply(avg_x, wavg);
      double cons = 0.0;
      for (const Vec& v : wavg) cons += norm2_sq(v);
      ReportRow row;
      row.iter = done;
      row.consensus_x = std::sqrt(cons);
      row.consensus_y = 0.0;
      row.comm_rounds = comm_rounds;
      row.oracle_calls = oracle_calls;
      if (done % gap_every == 0 || last) {
        Vec x_av(n, 0.0);
        std::vector<Vec> avg_p(m, Vec(n * n)), avg_q(m, Vec(2 * n));
        for (int i = 0; i < m; ++i) {
          for (int k = 0; k < n; ++k) x_av[k] += avg_x[i][k];
          for (int k = 0; k < n * n; ++k) avg_p[i][k] = sum_p[i][k] * inv;
          for (int k = 0; k < 2 * n; ++k) avg_q[i][k] = sum_q[i][k] * inv;
        }
        for (double& v : x_av) v /= static_cast<double>(m);
        row.has_gap = true;
        row.gap = wb_gap(instance, x_av, avg_p, avg_q) / static_cast<double>(m);
      }
      report.rows.push_back(row);
      if (last) {
        report.final_consensus_x = row.consensus_x;
        report.final_consensus_y = 0.0;
        if (row.has_gap) report.final_gap = row.gap;
      }
    }
  }

  const double inv = 1.0 / static_cast<double>(n_iter);
  result.barycenters.assign(m, Vec(n));
  result.plans.assign(m, Vec(n * n));
  result.duals.assign(m, Vec(2 * n));
  result.barycenter_av.assign(n, 0.0);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < n; ++k) {
      result.barycenters[i][k] = sum_x[i][k] * inv;
      result.barycenter_av[k] += result.barycenters[i][k];
    }
    for (int k = 0; k < n * n; ++k) result.plans[i][k] = sum_p[i][k] * inv;
    for (int k = 0; k < 2 * n; ++k) result.duals[i][k] = sum_q[i][k] * inv;
  }
  for (double& v : result.barycenter_av) v /= static_cast<double>(m);
  report.total_comm_rounds = comm_rounds;
  report.total_oracle_calls = oracle_calls;
  return result;
}

IbpResult ibp_baseline(const WbInstance& instance, double gamma_reg, int iterations) {
  if (!(gamma_reg > 0.0))
    throw std::invalid_argument("ibp_baseline: regularization must be positive");
  const int n = instance.n;
  const int m = instance.m;

  Mat kernel(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      kernel(i, j) = std::exp(-instance.cost(i, j) / gamma_reg);

  IbpResult result;
  result.barycenter.assign(n, 1.0 / n);

  // a kernel row that underflowed to all zeros dooms every scaling step
  for (int i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < n; ++j) row_sum += kernel(i, j);
    if (row_sum == 0.0) {
      result.diverged = true;
      result.divergence_iteration = 0;
      return result;
    }
  }

  std::vector<Vec> u(m, Vec(n, 1.0)), v(m, Vec(n, 1.0));
  Vec x(n, 1.0 / n);

  auto objective = [&]() {
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
      double mass = 0.0, costv = 0.0;
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
          const double pi = u[i][r] * kernel(r, c) * v[i][c];
          mass += pi;
          costv += instance.cost(r, c) * pi;
        }
      if (!(mass > 0.0) || !std::isfinite(costv / mass)) return std::nan("");
      total += costv / mass;
    }
    return total / static_cast<double>(m);
  };

  for (int it = 1; it <= iterations; ++it) {
    bool bad = false;
    for (int i = 0; i < m && !bad; ++i) {
      Vec ktu = kernel.apply_transpose(u[i]);
      for (int j = 0; j < n; ++j) {
        if (instance.measures[i][j] > 0.0 && !(ktu[j] > 0.0)) {
          bad = true;
          break;
        }
        v[i][j] = ktu[j] > 0.0 ? instance.measures[i][j] / ktu[j] : 0.0;
      }
    }
    if (!bad) {
      // geometric mean in log domain
      Vec logx(n, 0.0);
      for (int i = 0; i < m && !bad; ++i) {
        Vec kv = kernel.apply(v[i]);
        for (int j = 0; j < n; ++j) {
          const double t = u[i][j] * kv[j];
          if (!(t > 0.0) || !std::isfinite(t)) {
            bad = true;
            break;
          }
          logx[j] += std::log(t) / static_cast<double>(m);
        }
      }
      if (!bad) {
        double total = 0.0;
        for (int j = 0; j < n; ++j) {
          x[j] = std::exp(logx[j]);
          total += x[j];
        }
        if (!(total > 0.0) || !std::isfinite(total)) bad = true;
        else
          for (double& xv : x) xv /= total;
      }
    }
    if (!bad) {
      for (int i = 0; i < m && !bad; ++i) {
        Vec kv = kernel.apply(v[i]);
        for (int j = 0; j < n; ++j) {
          if (x[j] > 0.0 && !(kv[j] > 0.0)) {
            bad = true;
            break;
          }
          u[i][j] = kv[j] > 0.0 ? x[j] / kv[j] : 0.0;
          if (!std::isfinite(u[i][j])) {
            bad = true;
            break;
          }
        }
      }
    }
    if (bad) {
      result.diverged = true;
      result.divergence_iteration = it;
      return result;
    }
    const double obj = objective();
    if (std::isnan(obj)) {
      result.diverged = true;
      result.divergence_iteration = it;
      return result;
    }
    result.objective_trace.push_back(obj);
    result.barycenter = x;
  }
  return result;
}

std::vector<Vec> gaussian_histograms(int m, int n, double support_lo,
                                     double support_hi, double mean_lo,
                                     double mean_hi, double var_lo, double var_hi,
                                     std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("gaussian_histograms: need n >= 2");
  Rng rng(seed);
  std::vector<Vec> out;
  out.reserve(m);
  for (int i = 0; i < m; ++i) {
    const double mean = rng.uniform(mean_lo, mean_hi);
    const double var = rng.uniform(var_lo, var_hi);
    Vec h(n);
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
      const double t = support_lo + (support_hi - support_lo) * j / (n - 1.0);
      h[j] = std::exp(-(t - mean) * (t - mean) / (2.0 * var));
      total += h[j];
    }
    for (double& v : h) v /= total;
    out.push_back(std::move(h));
  }
  return out;
}

Mat grid_cost(int n, double lo, double hi, double max_entry) {
  Mat c(n, n);
  double biggest = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double ti = lo + (hi - lo) * i / std::max(n - 1.0, 1.0);
      const double tj = lo + (hi - lo) * j / std::max(n - 1.0, 1.0);
      c(i, j) = (ti - tj) * (ti - tj);
      biggest = std::max(biggest, c(i, j));
    }
  if (biggest > 0.0)
    for (double& v : c.a) v *= max_entry / biggest;
  return c;
}

std::vector<Vec> parse_measures_csv(const std::string& text) {
  std::vector<Vec> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Vec row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    out.push_back(std::move(row));
  }
  return out;
}

Mat parse_cost_csv(const std::string& text) {
  std::vector<Vec> rows = parse_measures_csv(text);
  const int n = static_cast<int>(rows.size());
  Mat c(n, n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != n)
      throw std::invalid_argument("cost csv must be square");
    for (int j = 0; j < n; ++j) c(i, j) = rows[i][j];
  }
  return c;
}

std::string vec_to_csv_row(const Vec& v) {
  std::ostringstream out;
  char buf[32];
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", v[i]);
    if (i) out << ',';
    out << buf;
  }
  out << '\n';
  return out.str();
}

std::string measures_to_csv(const std::vector<Vec>& measures) {
  std::string out;
  for (const Vec& v : measures) out += vec_to_csv_row(v);
  return out;
}

}  // namespace dmp
