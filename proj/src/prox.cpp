#include "dmp/prox.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace dmp {

namespace {
constexpr double kSimplexFloor = 1e-300;

void check_dim(const MirrorMap& map, const Vec& v, const char* what) {
  if (static_cast<int>(v.size()) != map.dim)
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}
}  // namespace

MirrorMap MirrorMap::entropic_simplex(int dim) {
  if (dim < 1) throw std::invalid_argument("simplex dimension must be positive");
  return {MapKind::EntropicSimplex, dim, 0.0, 0.0, 0.0};
}

MirrorMap MirrorMap::euclidean_unconstrained(int dim) {
  return {MapKind::EuclideanUnconstrained, dim, 0.0, 0.0, 0.0};
}

MirrorMap MirrorMap::euclidean_box(int dim, double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("box needs lo < hi");
  return {MapKind::EuclideanBox, dim, lo, hi, 0.0};
}

MirrorMap MirrorMap::euclidean_ball(int dim, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
  return {MapKind::EuclideanBall, dim, 0.0, 0.0, radius};
}

double MirrorMap::diameter_sq() const {
  switch (kind) {
    case MapKind::EntropicSimplex:
      return std::log(static_cast<double>(dim));
    case MapKind::EuclideanUnconstrained:
      return std::numeric_limits<double>::infinity();
    case MapKind::EuclideanBox: {
      // d(t) = 1/2 ||t||^2 is coordinate separable on the box
      const double per_max = 0.5 * std::max(lo * lo, hi * hi);
      const double per_min = (lo <= 0.0 && hi >= 0.0)
                                 ? 0.0
                                 : 0.5 * std::min(lo * lo, hi * hi);
      return dim * (per_max - per_min);
    }
    case MapKind::EuclideanBall:
      return 0.5 * radius * radius;
  }
  return 0.0;
}

Vec MirrorMap::prox_center() const {
  if (kind == MapKind::EntropicSimplex)
    return Vec(dim, 1.0 / static_cast<double>(dim));
  if (kind == MapKind::EuclideanBox && (lo > 0.0 || hi < 0.0)) {
    const double c = (lo > 0.0) ? lo : hi;  // closest point of the box to 0
    return Vec(dim, c);
  }
  return Vec(dim, 0.0);
}

bool MirrorMap::contains(const Vec& t, double tol) const {
  if (static_cast<int>(t.size()) != dim) return false;
  switch (kind) {
    case MapKind::EntropicSimplex: {
      double sum = 0.0;
      for (double v : t) {
        if (v < -tol) return false;
        sum += v;
      }
      return std::fabs(sum - 1.0) <= tol;
    }
    case MapKind::EuclideanUnconstrained:
      return true;
    case MapKind::EuclideanBox:
      for (double v : t)
        if (v < lo - tol || v > hi + tol) return false;
      return true;
    case MapKind::EuclideanBall:
      return norm2(t) <= radius + tol;
  }
  return false;
}

Vec mirror_step(const MirrorMap& map, const Vec& g, const Vec& t) {
  check_dim(map, g, "mirror_step gradient");
  check_dim(map, t, "mirror_step point");
  if (!all_finite(g)) throw std::invalid_argument("mirror_step: non-finite gradient");

  switch (map.kind) {
    case MapKind::EntropicSimplex: {
      // softmax of (log t - g), computed against the running max so the
      // exponentials cannot underflow to an all-zero weight vector
      Vec logw(map.dim);
      double mx = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < map.dim; ++i) {
        if (!(t[i] > 0.0))
          throw std::domain_error("entropic mirror_step needs t > 0");
        logw[i] = std::log(t[i]) - g[i];
        mx = std::max(mx, logw[i]);
      }
      Vec s(map.dim);
      double total = 0.0;
      for (int i = 0; i < map.dim; ++i) {
        s[i] = std::exp(logw[i] - mx);
        total += s[i];
      }
      for (int i = 0; i < map.dim; ++i)
        s[i] = std::max(s[i] / total, kSimplexFloor);
      return s;
    }
    case MapKind::EuclideanUnconstrained: {
      Vec s(map.dim);
      for (int i = 0; i < map.dim; ++i) s[i] = t[i] - g[i];
      return s;
    }
    case MapKind::EuclideanBox: {
      Vec s(map.dim);
      for (int i = 0; i < map.dim; ++i)
        s[i] = std::clamp(t[i] - g[i], map.lo, map.hi);
      return s;
    }
    case MapKind::EuclideanBall: {
      Vec s(map.dim);
      for (int i = 0; i < map.dim; ++i) s[i] = t[i] - g[i];
      const double n = norm2(s);
      if (n > map.radius) {
        const double scale = map.radius / n;
        for (double& v : s) v *= scale;
      }
      return s;
    }
  }
  throw std::logic_error("unreachable");
}

double bregman(const MirrorMap& map, const Vec& t, const Vec& t_ref) {
  check_dim(map, t, "bregman point");
  check_dim(map, t_ref, "bregman reference");
  if (map.kind == MapKind::EntropicSimplex) {
    // generalized KL; the linear terms cancel on the simplex but keeping
    // them makes the identity checks exact for nearly-normalized inputs
    double s = 0.0;
    for (int i = 0; i < map.dim; ++i) {
      if (!(t_ref[i] > 0.0))
        throw std::domain_error("bregman: entropic reference needs t_ref > 0");
      if (t[i] > 0.0) s += t[i] * std::log(t[i] / t_ref[i]);
      s += t_ref[i] - t[i];
    }
    return std::max(s, 0.0);
  }
  double s = 0.0;
  for (int i = 0; i < map.dim; ++i) {
    const double d = t[i] - t_ref[i];
    s += 0.5 * d * d;
  }
  return s;
}

Vec project(const MirrorMap& map, const Vec& v) {
  check_dim(map, v, "project");
  switch (map.kind) {
    case MapKind::EuclideanUnconstrained:
      return v;
    case MapKind::EuclideanBox: {
      Vec s(map.dim);
      for (int i = 0; i < map.dim; ++i) s[i] = std::clamp(v[i], map.lo, map.hi);
      return s;
    }
    case MapKind::EuclideanBall: {
      const double n = norm2(v);
      if (n <= map.radius) return v;
      Vec s = v;
      for (double& x : s) x *= map.radius / n;
      return s;
    }
    case MapKind::EntropicSimplex:
      throw std::invalid_argument("project: not a Euclidean map");
  }
  throw std::logic_error("unreachable");
}

Vec prox_gradient(const MirrorMap& map, const Vec& t) {
  check_dim(map, t, "prox_gradient");
  Vec g(map.dim);
  if (map.kind == MapKind::EntropicSimplex) {
    for (int i = 0; i < map.dim; ++i) {
      if (!(t[i] > 0.0)) throw std::domain_error("prox_gradient: t must be > 0");
      g[i] = std::log(t[i]) + 1.0;
    }
  } else {
    g = t;
  }
  return g;
}

}  // namespace dmp
