#pragma once

#include <cstdint>
#include <vector>

#include "dmp/engine.hpp"

namespace dmp {

// Per-node objective x.B_i y + c_i.x + e_i.y + (mu/2)||x||^2 - (mu/2)||y||^2
// over box or simplex feasible sets. The duality gap at consensus-projected
// averages has a coordinate-separable closed form, which is installed as the
// problem's gap oracle.
struct BilinearSpec {
  int node_count = 0;
  int dim_x = 0, dim_y = 0;
  std::vector<Mat> coupling;  // one dim_x x dim_y matrix per node
  std::vector<Vec> lin_x;     // c_i
  std::vector<Vec> lin_y;     // e_i
  double mu = 0.0;
  MirrorMap map_x;  // simplex or box
  MirrorMap map_y;

  static BilinearSpec random_box(int m, int dim_x, int dim_y, double scale,
                                 double mu, std::uint64_t seed);
};

SaddleProblem make_bilinear_problem(const BilinearSpec& spec);

}  // namespace dmp
