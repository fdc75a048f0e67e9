#pragma once

namespace hgas {

/// Dimension-dependent constants of the Coulomb problem in R^d.
struct GeometricConstants {
  int dimension;
  double c;             ///< c_2 = 1, c_d = d - 2 for d >= 3
  double k;             ///< k_d = c_d |S_{d-1}|, so that Laplacian W = k_d delta
  double sphere_area;   ///< |S_{d-1}|
  double ball_volume;   ///< |B_d|
};

GeometricConstants geometric_constants(int d);

}  // namespace hgas
