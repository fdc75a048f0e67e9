#pragma once

#include <cstddef>

namespace hgas::simd {

/// Power-law pair interaction used by the O(N^2) loops.
///
/// The field weight is w(r^2) = c (r^2)^{-p}; the pair energy is
/// c/2 log r^2 when s == 0 and -c/s (r^2)^{-s/2} otherwise.
struct PairParams {
  double c = 1.0;
  double p = 1.0;
  double s = 0.0;
};

/// Inputs are axis-major: x[k * n + i]. Outputs:
///  field[k * n + i] = sum_{j != i} q_j w(|x_i - x_j|^2) (x_i - x_j)_k  (overwritten)
///  min_r2[i]        = min_{j != i} |x_i - x_j|^2                       (optional, overwritten)
///  return value     = sum_{i < j} q_i q_j W(|x_i - x_j|)               (0 unless want_energy)
struct PairArgs {
  int dim = 2;
  std::size_t n = 0;
  const double* x = nullptr;
  const double* q = nullptr;
  PairParams params;
  double* field = nullptr;
  double* min_r2 = nullptr;
  bool want_energy = true;
};

double pair_scalar(const PairArgs& a);
double pair_avx2(const PairArgs& a);

}  // namespace hgas::simd
