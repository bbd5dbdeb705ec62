#include "dmp/sliding.hpp"

#include <cmath>
#include <stdexcept>

namespace dmp {

Projector identity_projector() {
  return [](const Vec& v) { return v; };
}

Projector map_projector(const MirrorMap& map) {
  return [map](const Vec& v) { return project(map, v); };
}

SlidingConfig SlidingConfig::derive(double lip_a, double lip_b, double mu,
                                    double eps, double r0_sq) {
  if (!(mu > 0.0)) throw std::invalid_argument("sliding: mu must be positive");
  SlidingConfig cfg;
  cfg.eta = std::min(1.0 / (2.0 * std::max(lip_a, 1e-300)), 1.0 / (6.0 * mu));
  const double inv = 64.0 / (cfg.eta * mu) + 64.0 * cfg.eta * lip_b * lip_b / mu;
  cfg.delta = std::min(0.25, 1.0 / inv);
  cfg.inner_t = fbf_iterations(cfg.eta, lip_b, cfg.delta);
  cfg.outer_n = static_cast<int>(
      std::ceil(std::log(std::max(r0_sq / eps, 1.0)) / (cfg.eta * mu))) + 1;
  return cfg;
}

int fbf_iterations(double eta, double lip_b, double delta) {
  if (!(delta > 0.0 && delta <= 0.25))
    throw std::invalid_argument("fbf_iterations: delta must lie in (0, 1/4]");
  // one FBF step on a 1-strongly monotone, Lhat-Lipschitz operator with step
  // 1/(2 Lhat) contracts the squared distance by at least 1 - 1/(4 Lhat);
  // solve (1 - 1/(4 Lhat))^T <= delta / 4 for T (the /4 absorbs the
  // start-vs-solution re-centering)
  const double lhat = 1.0 + eta * lip_b;
  const double rate = 1.0 - 1.0 / (4.0 * lhat);
  const double t = std::log(delta / 4.0) / std::log(rate);
  return std::max(1, static_cast<int>(std::ceil(t)));
}

Vec fbf_inner(SplitOperator& op, double eta, const Vec& nu, const Projector& proj,
              const Vec& start, int iterations) {
  if (iterations < 1) throw std::invalid_argument("fbf_inner: need T >= 1");
  const double lip_b = op.lip_b();
  if (lip_b == 0.0) {
    // constant B: the auxiliary solution is an explicit projection
    Vec shift = op.eval_b(start);
    Vec v(nu.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = nu[i] - eta * shift[i];
    return proj(v);
  }

  const double sigma = 1.0 / (2.0 * (1.0 + eta * lip_b));
  auto aux = [&](const Vec& t) {
    Vec h = op.eval_b(t);
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = eta * h[i] + t[i] - nu[i];
    return h;
  };

  Vec theta = start;
  for (int t = 0; t < iterations; ++t) {
    Vec h_theta = aux(theta);
    Vec fw(theta.size());
    for (std::size_t i = 0; i < fw.size(); ++i) fw[i] = theta[i] - sigma * h_theta[i];
    Vec mid = proj(fw);
    Vec h_mid = aux(mid);
    for (std::size_t i = 0; i < mid.size(); ++i)
      mid[i] += sigma * (h_theta[i] - h_mid[i]);
    theta = proj(mid);
  }
  return theta;
}

SlidingRunResult sliding_run(SplitOperator& op, const Projector& proj,
                             const Vec& start, const SlidingConfig& config,
                             const Vec& reference) {
  if (config.outer_n < 1 || config.inner_t < 1 || !(config.eta > 0.0))
    throw std::invalid_argument("sliding_run: config not initialized");

  Vec zeta = proj(start);
  SlidingRunResult result;
  for (int k = 0; k < config.outer_n; ++k) {
    Vec a_zeta = op.eval_a(zeta);
    Vec nu(zeta.size());
    for (std::size_t i = 0; i < nu.size(); ++i)
      nu[i] = zeta[i] - config.eta * a_zeta[i];

    Vec theta = fbf_inner(op, config.eta, nu, proj, zeta, config.inner_t);
    Vec a_theta = op.eval_a(theta);
    for (std::size_t i = 0; i < theta.size(); ++i)
      theta[i] += config.eta * (a_zeta[i] - a_theta[i]);
    zeta = proj(theta);
    if (!all_finite(zeta))
      throw NumericFailure("sliding_run: non-finite state at step " +
                           std::to_string(k));
    if (!reference.empty()) {
      double d = 0.0;
      for (std::size_t i = 0; i < zeta.size(); ++i) {
        const double diff = zeta[i] - reference[i];
        d += diff * diff;
      }
      result.distances.push_back(d);
    }
  }
  result.point = std::move(zeta);
  result.calls_a = op.count_a();
  result.calls_b = op.count_b();
  return result;
}

double sliding_reg_alpha(double eps, double gamma, double lambda_min_pos,
                         double m_bound) {
  return eps * gamma * gamma * lambda_min_pos * lambda_min_pos /
         (4.0 * m_bound * m_bound);
}

double sliding_reg_gamma(double eps, double mu, double lambda_min_pos,
                         double m_bound) {
  return std::sqrt(4.0 * m_bound * m_bound * mu /
                   (eps * lambda_min_pos * lambda_min_pos));
}

namespace {

struct BlockLayout {
  int m = 0, dx = 0, dp = 0, dy = 0, dq = 0;
  int total = 0;
  int off_x(int i) const { return i * dx; }
  int off_p(int i) const { return m * dx + i * dp; }
  int off_s(int i) const { return m * (dx + dp) + i * dy; }
  int off_y(int i) const { return m * (dx + dp + dy) + i * dy; }
  int off_q(int i) const { return m * (dx + dp + 2 * dy) + i * dq; }
  int off_z(int i) const { return m * (dx + dp + 2 * dy + dq) + i * dx; }
};

}  // namespace

RegularizedSplit regularize_saddle(const SaddleProblem& problem,
                                   const GossipMatrix& w, double gamma,
                                   double alpha, double mu, double lip_f) {
  if (!(mu > 0.0))
    throw std::invalid_argument(
        "regularize_saddle: needs strongly convex-concave objectives (mu > 0)");
  BlockLayout lay;
  lay.m = problem.node_count;
  lay.dx = problem.dim_x;
  lay.dp = problem.dim_p;
  lay.dy = problem.dim_y;
  lay.dq = problem.dim_q;
  lay.total = lay.m * (2 * lay.dx + lay.dp + 2 * lay.dy + lay.dq);

  const SaddleProblem pb = problem;
  auto a_field = [pb, lay](const Vec& v) {
    Vec out(lay.total, 0.0);
    for (int i = 0; i < lay.m; ++i) {
      Vec x(v.begin() + lay.off_x(i), v.begin() + lay.off_x(i) + lay.dx);
      Vec p(v.begin() + lay.off_p(i), v.begin() + lay.off_p(i) + lay.dp);
      Vec y(v.begin() + lay.off_y(i), v.begin() + lay.off_y(i) + lay.dy);
      Vec q(v.begin() + lay.off_q(i), v.begin() + lay.off_q(i) + lay.dq);
      NodeGradients g = pb.oracle(i, x, p, y, q);
      for (int k = 0; k < lay.dx; ++k) out[lay.off_x(i) + k] = g.gx[k];
      for (int k = 0; k < lay.dp; ++k) out[lay.off_p(i) + k] = g.gp[k];
      for (int k = 0; k < lay.dy; ++k) out[lay.off_y(i) + k] = -g.gy[k];
      for (int k = 0; k < lay.dq; ++k) out[lay.off_q(i) + k] = -g.gq[k];
    }
    return out;
  };

  const GossipMatrix wm = w;
  auto b_field = [wm, lay, gamma, alpha](const Vec& v) {
    Vec out(lay.total, 0.0);
    auto gather = [&](int off0, int d, int stride_of) {
      std::vector<Vec> blocks(lay.m);
      for (int i = 0; i < lay.m; ++i)
        blocks[i].assign(v.begin() + off0 + i * stride_of,
                         v.begin() + off0 + i * stride_of + d);
      return blocks;
    };
    if (lay.dx > 0) {
      auto xs = gather(lay.off_x(0), lay.dx, lay.dx);
      auto zs = gather(lay.off_z(0), lay.dx, lay.dx);
      std::vector<Vec> wz, wx;
      wm.apply(zs, wz);
      wm.apply(xs, wx);
      for (int i = 0; i < lay.m; ++i)
        for (int k = 0; k < lay.dx; ++k) {
          out[lay.off_x(i) + k] += gamma * wz[i][k];
          out[lay.off_z(i) + k] += -gamma * wx[i][k] + alpha * zs[i][k];
        }
    }
    if (lay.dy > 0) {
      auto ys = gather(lay.off_y(0), lay.dy, lay.dy);
      auto ss = gather(lay.off_s(0), lay.dy, lay.dy);
      std::vector<Vec> wy, ws;
      wm.apply(ys, wy);
      wm.apply(ss, ws);
      for (int i = 0; i < lay.m; ++i)
        for (int k = 0; k < lay.dy; ++k) {
          out[lay.off_s(i) + k] += gamma * wy[i][k] + alpha * ss[i][k];
          out[lay.off_y(i) + k] += -gamma * ws[i][k];
        }
    }
    return out;
  };

  const double lip_b = gamma * w.lambda_max + alpha;
  const double mu_g = std::min(mu, alpha);

  // product projector over the per-node feasible sets; dual blocks are free
  const MirrorMap map_x = problem.map_x, map_p = problem.map_p,
                  map_y = problem.map_y, map_q = problem.map_q;
  Projector proj = [lay, map_x, map_p, map_y, map_q](const Vec& v) {
    Vec out = v;
    auto apply_proj = [&](const MirrorMap& map, int off, int d) {
      if (d == 0) return;
      Vec piece(v.begin() + off, v.begin() + off + d);
      Vec pr = project(map, piece);
      std::copy(pr.begin(), pr.end(), out.begin() + off);
    };
    for (int i = 0; i < lay.m; ++i) {
      apply_proj(map_x, lay.off_x(i), lay.dx);
      apply_proj(map_p, lay.off_p(i), lay.dp);
      apply_proj(map_y, lay.off_y(i), lay.dy);
      apply_proj(map_q, lay.off_q(i), lay.dq);
    }
    return out;
  };

  return RegularizedSplit{
      SplitOperator(std::move(a_field), std::move(b_field), lip_f, lip_b, mu_g),
      std::move(proj), lay.total};
}

}  // namespace dmp
