#include "dmp/bilinear.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dmp {

namespace {

// max over t in [lo, hi] of a t - (mu/2) t^2
double box_max_1d(double a, double mu, double lo, double hi) {
  if (mu > 0.0) {
    const double t = std::clamp(a / mu, lo, hi);
    return a * t - 0.5 * mu * t * t;
  }
  return a >= 0.0 ? a * hi : a * lo;
}

// min over t in [lo, hi] of a t + (mu/2) t^2
double box_min_1d(double a, double mu, double lo, double hi) {
  if (mu > 0.0) {
    const double t = std::clamp(-a / mu, lo, hi);
    return a * t + 0.5 * mu * t * t;
  }
  return a >= 0.0 ? a * lo : a * hi;
}

double inner_max(const MirrorMap& map, const Vec& coef, double mu) {
  if (map.kind == MapKind::EntropicSimplex) {
    if (mu != 0.0)
      throw UnsupportedProblem("bilinear gap: quadratic term over a simplex");
    return *std::max_element(coef.begin(), coef.end());
  }
  if (map.kind == MapKind::EuclideanBox) {
    double s = 0.0;
    for (double a : coef) s += box_max_1d(a, mu, map.lo, map.hi);
    return s;
  }
  throw UnsupportedProblem("bilinear gap: unsupported feasible set");
}

double inner_min(const MirrorMap& map, const Vec& coef, double mu) {
  if (map.kind == MapKind::EntropicSimplex) {
    if (mu != 0.0)
      throw UnsupportedProblem("bilinear gap: quadratic term over a simplex");
    return *std::min_element(coef.begin(), coef.end());
  }
  if (map.kind == MapKind::EuclideanBox) {
    double s = 0.0;
    for (double a : coef) s += box_min_1d(a, mu, map.lo, map.hi);
    return s;
  }
  throw UnsupportedProblem("bilinear gap: unsupported feasible set");
}

}  // namespace

BilinearSpec BilinearSpec::random_box(int m, int dim_x, int dim_y, double scale,
                                      double mu, std::uint64_t seed) {
  BilinearSpec spec;
  spec.node_count = m;
  spec.dim_x = dim_x;
  spec.dim_y = dim_y;
  spec.mu = mu;
  spec.map_x = MirrorMap::euclidean_box(dim_x, -1.0, 1.0);
  spec.map_y = MirrorMap::euclidean_box(dim_y, -1.0, 1.0);
  Rng rng(seed);
  for (int i = 0; i < m; ++i) {
    Mat b(dim_x, dim_y);
    for (double& v : b.a) v = scale * rng.uniform(-1.0, 1.0);
    spec.coupling.push_back(std::move(b));
    Vec c(dim_x), e(dim_y);
    for (double& v : c) v = scale * rng.uniform(-1.0, 1.0);
    for (double& v : e) v = scale * rng.uniform(-1.0, 1.0);
    spec.lin_x.push_back(std::move(c));
    spec.lin_y.push_back(std::move(e));
  }
  return spec;
}

SaddleProblem make_bilinear_problem(const BilinearSpec& spec) {
  if (spec.node_count < 1 ||
      static_cast<int>(spec.coupling.size()) != spec.node_count)
    throw std::invalid_argument("bilinear spec: one coupling matrix per node");

  SaddleProblem pb;
  pb.node_count = spec.node_count;
  pb.dim_x = spec.dim_x;
  pb.dim_p = 0;
  pb.dim_y = spec.dim_y;
  pb.dim_q = 0;
  pb.map_x = spec.map_x;
  pb.map_p = MirrorMap::euclidean_unconstrained(0);
  pb.map_y = spec.map_y;
  pb.map_q = MirrorMap::euclidean_unconstrained(0);

  // conservative gradient and smoothness bounds from Frobenius norms and
  // the feasible-set radii
  double frob = 0.0, cmax = 0.0, emax = 0.0;
  for (int i = 0; i < spec.node_count; ++i) {
    frob = std::max(frob, std::sqrt(norm2_sq(spec.coupling[i].a)));
    cmax = std::max(cmax, norm2(spec.lin_x[i]));
    emax = std::max(emax, norm2(spec.lin_y[i]));
  }
  auto set_radius = [](const MirrorMap& map, int dim) {
    if (map.kind == MapKind::EntropicSimplex) return 1.0;
    if (map.kind == MapKind::EuclideanBox)
      return std::max(std::fabs(map.lo), std::fabs(map.hi)) * std::sqrt(double(dim));
    return map.radius;
  };
  const double rx = spec.dim_x > 0 ? set_radius(spec.map_x, spec.dim_x) : 0.0;
  const double ry = spec.dim_y > 0 ? set_radius(spec.map_y, spec.dim_y) : 0.0;
  pb.grad_bound_x = frob * ry + cmax + spec.mu * rx;
  pb.grad_bound_y = frob * rx + emax + spec.mu * ry;
  pb.lipschitz.min_min = spec.mu;
  pb.lipschitz.max_max = spec.mu;
  pb.lipschitz.min_max = frob;
  pb.lipschitz.max_min = frob;

  const BilinearSpec sp = spec;
  pb.oracle = [sp](int node, const Vec& x, const Vec& /*p*/, const Vec& y,
                   const Vec& /*q*/) {
    NodeGradients g;
    const Mat& b = sp.coupling[node];
    g.gx = b.apply(y);
    g.gy = b.apply_transpose(x);
    g.value = dot(x, g.gx) + dot(sp.lin_x[node], x) + dot(sp.lin_y[node], y) +
              0.5 * sp.mu * (norm2_sq(x) - norm2_sq(y));
    for (int k = 0; k < sp.dim_x; ++k)
      g.gx[k] += sp.lin_x[node][k] + sp.mu * x[k];
    for (int k = 0; k < sp.dim_y; ++k)
      g.gy[k] += sp.lin_y[node][k] - sp.mu * y[k];
    return g;
  };

  pb.gap_oracle = [sp](const SaddleProblem& p_, const IterateBlock& block) {
    const double m = static_cast<double>(p_.node_count);
    Vec x_av(sp.dim_x, 0.0), y_av(sp.dim_y, 0.0);
    for (const Vec& xi : block.x)
      for (int k = 0; k < sp.dim_x; ++k) x_av[k] += xi[k] / m;
    for (const Vec& yi : block.y)
      for (int k = 0; k < sp.dim_y; ++k) y_av[k] += yi[k] / m;

    // max over consensual y at x_av
    Vec coef_y(sp.dim_y, 0.0);
    double max_side = 0.5 * sp.mu * norm2_sq(x_av);
    for (int i = 0; i < p_.node_count; ++i) {
      Vec btx = sp.coupling[i].apply_transpose(x_av);
      for (int k = 0; k < sp.dim_y; ++k)
        coef_y[k] += (btx[k] + sp.lin_y[i][k]) / m;
      max_side += dot(sp.lin_x[i], x_av) / m;
    }
    if (sp.dim_y > 0) max_side += inner_max(sp.map_y, coef_y, sp.mu);

    // min over consensual x at y_av
    Vec coef_x(sp.dim_x, 0.0);
    double min_side = -0.5 * sp.mu * norm2_sq(y_av);
    for (int i = 0; i < p_.node_count; ++i) {
      Vec by = sp.coupling[i].apply(y_av);
      for (int k = 0; k < sp.dim_x; ++k)
        coef_x[k] += (by[k] + sp.lin_x[i][k]) / m;
      min_side += dot(sp.lin_y[i], y_av) / m;
    }
    if (sp.dim_x > 0) min_side += inner_min(sp.map_x, coef_x, sp.mu);

    return max_side - min_side;
  };
  return pb;
}

}  // namespace dmp
