// Compiled with -mavx2 -mfma. Keep standard-library templates out of this file
// so no AVX-encoded copy of an inline function leaks into other translation units.
#include <immintrin.h>

#include "hgas/simd/pair_kernel.hpp"

namespace hgas::simd {
namespace {

constexpr double ln2_hi = 6.93147180369123816490e-01;
constexpr double ln2_lo = 1.90821492927058770002e-10;
constexpr double two52 = 4503599627370496.0;

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  lo = _mm_add_pd(lo, _mm256_extractf128_pd(v, 1));
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

inline double hmin(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  lo = _mm_min_pd(lo, _mm256_extractf128_pd(v, 1));
  return _mm_cvtsd_f64(_mm_min_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// Natural log for positive normal doubles. m in [sqrt(1/2), sqrt(2)),
// log m = 2 atanh(f / (2 + f)) summed as an odd series.
inline __m256d vlog(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i expfield = _mm256_srli_epi64(bits, 52);
  const __m256i mant = _mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL)),
                                       _mm256_set1_epi64x(0x3FF0000000000000LL));
  __m256d m = _mm256_castsi256_pd(mant);
  __m256d e = _mm256_sub_pd(
      _mm256_castsi256_pd(_mm256_or_si256(expfield, _mm256_set1_epi64x(0x4330000000000000LL))),
      _mm256_set1_pd(two52 + 1023.0));
  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(1.4142135623730951), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  e = _mm256_add_pd(e, _mm256_and_pd(big, _mm256_set1_pd(1.0)));
  const __m256d f = _mm256_sub_pd(m, _mm256_set1_pd(1.0));
  const __m256d s = _mm256_div_pd(f, _mm256_add_pd(f, _mm256_set1_pd(2.0)));
  const __m256d z = _mm256_mul_pd(s, s);
  __m256d p = _mm256_set1_pd(1.0 / 23);
  for (int k = 10; k >= 0; --k) p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.0 / (2 * k + 1)));
  const __m256d logm = _mm256_mul_pd(_mm256_add_pd(s, s), p);
  return _mm256_fmadd_pd(e, _mm256_set1_pd(ln2_hi), _mm256_fmadd_pd(e, _mm256_set1_pd(ln2_lo), logm));
}

constexpr double inv_fact[14] = {1.0,
                                 1.0,
                                 1.0 / 2,
                                 1.0 / 6,
                                 1.0 / 24,
                                 1.0 / 120,
                                 1.0 / 720,
                                 1.0 / 5040,
                                 1.0 / 40320,
                                 1.0 / 362880,
                                 1.0 / 3628800,
                                 1.0 / 39916800,
                                 1.0 / 479001600,
                                 1.0 / 6227020800.0};

inline __m256d vexp(__m256d y) {
  y = _mm256_max_pd(_mm256_min_pd(y, _mm256_set1_pd(709.0)), _mm256_set1_pd(-708.0));
  const __m256d k = _mm256_round_pd(_mm256_mul_pd(y, _mm256_set1_pd(1.4426950408889634)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, _mm256_set1_pd(ln2_hi), y);
  r = _mm256_fnmadd_pd(k, _mm256_set1_pd(ln2_lo), r);
  __m256d p = _mm256_set1_pd(inv_fact[13]);
  for (int j = 12; j >= 0; --j) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(inv_fact[j]));
  const __m256i kb = _mm256_castpd_si256(_mm256_add_pd(k, _mm256_set1_pd(two52 + 1023.0)));
  const __m256d scale = _mm256_castsi256_pd(_mm256_slli_epi64(kb, 52));
  return _mm256_mul_pd(p, scale);
}

// r2^{-e}: products of r2, sqrt(r2) and r2^{1/4} when 4e is a small integer.
struct PowPlan {
  int mode = 0;  // 0: constant 1, 1: quarter powers, 2: exp/log
  int whole = 0, half = 0, quarter = 0;
  bool invert = false;
  double e = 0;
};

PowPlan make_plan(double e) {
  PowPlan pl;
  pl.e = e;
  if (e == 0) return pl;
  const double m4 = 4 * e;
  const int mi = static_cast<int>(m4 < 0 ? m4 - 0.5 : m4 + 0.5);
  if (m4 == mi && mi >= -32 && mi <= 32) {
    const int m = mi < 0 ? -mi : mi;
    pl.mode = 1;
    pl.whole = m / 4;
    pl.half = (m % 4) / 2;
    pl.quarter = m % 2;
    pl.invert = mi > 0;
    return pl;
  }
  pl.mode = 2;
  return pl;
}

inline __m256d vpow(__m256d r2, const PowPlan& pl) {
  const __m256d one = _mm256_set1_pd(1.0);
  if (pl.mode == 0) return one;
  if (pl.mode == 2) return vexp(_mm256_mul_pd(_mm256_set1_pd(-pl.e), vlog(r2)));
  __m256d t = one;
  for (int k = 0; k < pl.whole; ++k) t = _mm256_mul_pd(t, r2);
  if (pl.half || pl.quarter) {
    const __m256d sq = _mm256_sqrt_pd(r2);
    if (pl.half) t = _mm256_mul_pd(t, sq);
    if (pl.quarter) t = _mm256_mul_pd(t, _mm256_sqrt_pd(sq));
  }
  return pl.invert ? _mm256_div_pd(one, t) : t;
}

struct Plans {
  PowPlan field;
  PowPlan energy;
  bool log_energy = false;
  double c = 1, energy_scale = 0;
};

template <int D, bool Masked>
inline void body(const PairArgs& a, const Plans& pl, std::size_t j, __m256i mask, const __m256d* xi, __m256d qi,
                 __m256d* acc, __m256d& eacc, __m256d& vmin) {
  const std::size_t n = a.n;
  __m256d dx[D];
  __m256d r2 = _mm256_setzero_pd();
  for (int k = 0; k < D; ++k) {
    const __m256d xj = Masked ? _mm256_maskload_pd(a.x + k * n + j, mask) : _mm256_loadu_pd(a.x + k * n + j);
    dx[k] = _mm256_sub_pd(xi[k], xj);
    r2 = _mm256_fmadd_pd(dx[k], dx[k], r2);
  }
  __m256d qj;
  if (Masked) {
    const __m256d live = _mm256_castsi256_pd(mask);
    r2 = _mm256_blendv_pd(_mm256_set1_pd(1.0), r2, live);
    qj = _mm256_maskload_pd(a.q + j, mask);
  } else {
    qj = _mm256_loadu_pd(a.q + j);
  }
  const __m256d w = _mm256_mul_pd(_mm256_set1_pd(pl.c), vpow(r2, pl.field));
  const __m256d qjw = _mm256_mul_pd(qj, w);
  const __m256d qiw = _mm256_mul_pd(qi, w);
  for (int k = 0; k < D; ++k) {
    acc[k] = _mm256_fmadd_pd(qjw, dx[k], acc[k]);
    double* fj = a.field + k * n + j;
    if (Masked) {
      const __m256d f = _mm256_maskload_pd(fj, mask);
      _mm256_maskstore_pd(fj, mask, _mm256_fnmadd_pd(qiw, dx[k], f));
    } else {
      _mm256_storeu_pd(fj, _mm256_fnmadd_pd(qiw, dx[k], _mm256_loadu_pd(fj)));
    }
  }
  if (a.min_r2) {
    __m256d r2m = r2;
    if (Masked)
      r2m = _mm256_blendv_pd(_mm256_set1_pd(__builtin_inf()), r2, _mm256_castsi256_pd(mask));
    vmin = _mm256_min_pd(vmin, r2m);
    double* mj = a.min_r2 + j;
    if (Masked)
      _mm256_maskstore_pd(mj, mask, _mm256_min_pd(_mm256_maskload_pd(mj, mask), r2m));
    else
      _mm256_storeu_pd(mj, _mm256_min_pd(_mm256_loadu_pd(mj), r2m));
  }
  if (a.want_energy) {
    __m256d wv;
    if (pl.log_energy)
      wv = _mm256_mul_pd(_mm256_set1_pd(0.5 * pl.c), vlog(r2));
    else
      wv = _mm256_mul_pd(_mm256_set1_pd(pl.energy_scale), vpow(r2, pl.energy));
    eacc = _mm256_fmadd_pd(qj, wv, eacc);
  }
}

template <int D>
double run(const PairArgs& a, const Plans& pl) {
  const std::size_t n = a.n;
  for (std::size_t k = 0; k < D * n; ++k) a.field[k] = 0;
  if (a.min_r2)
    for (std::size_t i = 0; i < n; ++i) a.min_r2[i] = __builtin_inf();
  const __m256i lane = _mm256_set_epi64x(3, 2, 1, 0);
  double energy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    __m256d xi[D], acc[D];
    for (int k = 0; k < D; ++k) {
      xi[k] = _mm256_set1_pd(a.x[k * n + i]);
      acc[k] = _mm256_setzero_pd();
    }
    const __m256d qi = _mm256_set1_pd(a.q[i]);
    __m256d eacc = _mm256_setzero_pd();
    __m256d vmin = _mm256_set1_pd(__builtin_inf());
    std::size_t j = i + 1;
    for (; j + 4 <= n; j += 4) body<D, false>(a, pl, j, lane, xi, qi, acc, eacc, vmin);
    if (j < n) {
      const __m256i mask = _mm256_cmpgt_epi64(_mm256_set1_epi64x(static_cast<long long>(n - j)), lane);
      body<D, true>(a, pl, j, mask, xi, qi, acc, eacc, vmin);
    }
    for (int k = 0; k < D; ++k) a.field[k * n + i] += hsum(acc[k]);
    if (a.min_r2) {
      const double m = hmin(vmin);
      if (m < a.min_r2[i]) a.min_r2[i] = m;
    }
    if (a.want_energy) energy += a.q[i] * hsum(eacc);
  }
  return energy;
}

}  // namespace

double pair_avx2(const PairArgs& a) {
  Plans pl;
  pl.c = a.params.c;
  pl.field = make_plan(a.params.p);
  pl.log_energy = a.params.s == 0;
  if (!pl.log_energy) {
    pl.energy = make_plan(0.5 * a.params.s);
    pl.energy_scale = -a.params.c / a.params.s;
  }
  if (a.dim == 2) return run<2>(a, pl);
  if (a.dim == 3) return run<3>(a, pl);
  return pair_scalar(a);
}

}  // namespace hgas::simd
