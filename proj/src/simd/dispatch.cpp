#include <atomic>
#include <string>

#include "hgas/error.hpp"
#include "hgas/simd.hpp"

namespace hgas {
namespace {

// -1: not forced
std::atomic<int> forced{-1};

bool cpu_has_avx2() {
#if defined(HGAS_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

}  // namespace

std::string_view to_string(SimdBackend b) { return b == SimdBackend::avx2 ? "avx2" : "scalar"; }

bool backend_available(SimdBackend b) { return b == SimdBackend::scalar || cpu_has_avx2(); }

SimdBackend active_backend() {
  const int f = forced.load(std::memory_order_relaxed);
  if (f >= 0) return static_cast<SimdBackend>(f);
  return cpu_has_avx2() ? SimdBackend::avx2 : SimdBackend::scalar;
}

void force_backend(SimdBackend b) {
  if (!backend_available(b)) throw Error(Errc::unsupported, std::string("backend not available: ") + std::string(to_string(b)));
  forced.store(static_cast<int>(b), std::memory_order_relaxed);
}

void reset_backend() { forced.store(-1, std::memory_order_relaxed); }

double pair_interactions(const simd::PairArgs& args) {
  if (args.dim < 1 || args.dim > 16) throw Error(Errc::unsupported, "pair loop supports 1 <= d <= 16");
#if defined(HGAS_HAVE_AVX2)
  if (active_backend() == SimdBackend::avx2) return simd::pair_avx2(args);
#endif
  return simd::pair_scalar(args);
}

}  // namespace hgas
