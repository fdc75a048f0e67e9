#include <cmath>
#include <limits>

#include "hgas/simd/pair_kernel.hpp"

namespace hgas::simd {

double pair_scalar(const PairArgs& a) {
  const std::size_t n = a.n;
  const int d = a.dim;
  const double c = a.params.c, p = a.params.p, s = a.params.s;
  for (std::size_t k = 0; k < d * n; ++k) a.field[k] = 0;
  if (a.min_r2)
    for (std::size_t i = 0; i < n; ++i) a.min_r2[i] = std::numeric_limits<double>::infinity();
  double energy = 0;
  double diff[16];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double r2 = 0;
      for (int k = 0; k < d; ++k) {
        diff[k] = a.x[k * n + i] - a.x[k * n + j];
        r2 += diff[k] * diff[k];
      }
      const double w = c * std::pow(r2, -p);
      for (int k = 0; k < d; ++k) {
        a.field[k * n + i] += a.q[j] * w * diff[k];
        a.field[k * n + j] -= a.q[i] * w * diff[k];
      }
      if (a.min_r2) {
        if (r2 < a.min_r2[i]) a.min_r2[i] = r2;
        if (r2 < a.min_r2[j]) a.min_r2[j] = r2;
      }
      if (a.want_energy) {
        const double wv = s == 0 ? 0.5 * c * std::log(r2) : -c / s * std::pow(r2, -0.5 * s);
        energy += a.q[i] * a.q[j] * wv;
      }
    }
  }
  return energy;
}

}  // namespace hgas::simd
