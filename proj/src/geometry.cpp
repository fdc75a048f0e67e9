#include "hgas/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "hgas/error.hpp"

namespace hgas {

GeometricConstants geometric_constants(int d) {
  if (d < 2) throw Error(Errc::invalid_dimension, "dimension must be >= 2, got " + std::to_string(d));
  GeometricConstants g{};
  g.dimension = d;
  g.c = d == 2 ? 1.0 : d - 2.0;
  g.sphere_area = 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
  g.ball_volume = g.sphere_area / d;
  g.k = g.c * g.sphere_area;
  return g;
}

}  // namespace hgas
