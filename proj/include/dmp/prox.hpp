#pragma once

#include "dmp/common.hpp"

namespace dmp {

enum class MapKind {
  EntropicSimplex,        // l1 norm, negative entropy prox-function
  EuclideanUnconstrained,  // l2 norm, 1/2 ||.||^2
  EuclideanBox,
  EuclideanBall,
};

// A proximal setup: feasible set, norm, 1-strongly-convex prox-function and
// the closed-form mirror step that goes with them.
struct MirrorMap {
  MapKind kind = MapKind::EuclideanUnconstrained;
  int dim = 0;
  double lo = 0.0, hi = 0.0;  // box bounds
  double radius = 0.0;        // ball radius

  static MirrorMap entropic_simplex(int dim);
  static MirrorMap euclidean_unconstrained(int dim);
  static MirrorMap euclidean_box(int dim, double lo, double hi);
  static MirrorMap euclidean_ball(int dim, double radius);

  // max d(t) - min d(t') over the set; +inf sentinel for unconstrained
  double diameter_sq() const;
  // argmin of the prox-function (uniform vector / zero)
  Vec prox_center() const;
  bool contains(const Vec& t, double tol = 1e-9) const;
};

// argmin over the feasible set of <g, s> + B(s, t). Entropic maps are
// evaluated in log domain; simplex outputs are floored at 1e-300 so
// subsequent logs stay finite.
Vec mirror_step(const MirrorMap& map, const Vec& g, const Vec& t);

// Bregman divergence B(t, t_ref) of the map's prox-function; >= 0, zero iff
// t == t_ref. Entropic maps use 0 ln 0 := 0 and require t_ref > 0.
double bregman(const MirrorMap& map, const Vec& t, const Vec& t_ref);

// Euclidean projection; only defined for the Euclidean map kinds.
Vec project(const MirrorMap& map, const Vec& v);

// gradient of the prox-function (used by the three-point identity checks)
Vec prox_gradient(const MirrorMap& map, const Vec& t);

}  // namespace dmp
