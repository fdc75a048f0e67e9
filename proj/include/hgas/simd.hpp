#pragma once

#include <string_view>

#include "hgas/simd/pair_kernel.hpp"

namespace hgas {

enum class SimdBackend { scalar, avx2 };

std::string_view to_string(SimdBackend b);

/// True when the CPU and the build both support the backend.
bool backend_available(SimdBackend b);
/// Best available backend unless one was forced.
SimdBackend active_backend();
/// Pins the backend process-wide (tests and benchmarks). Throws unsupported
/// if the backend is not available.
void force_backend(SimdBackend b);
void reset_backend();

/// Runs the pair loop on the active backend.
double pair_interactions(const simd::PairArgs& args);

}  // namespace hgas
