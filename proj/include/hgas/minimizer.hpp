#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "hgas/configuration.hpp"
#include "hgas/gas_spec.hpp"

namespace hgas {

struct AnnealSchedule {
  double beta0 = 1.0;
  double beta_growth = 1.5;
  int stages = 40;
  int steps_per_stage = 500;
  /// Langevin step; 0 selects a value from the gas (see default_step_size).
  double step_size = 0.0;
  double step_decay = 1.0;
  /// Stop threshold on residual_force_norm for the final descent.
  double residual_threshold = 1e-8;
  int max_descent_iterations = 20000;
  int lbfgs_memory = 8;
  /// Trace sampling period (steps) during annealing.
  int trace_every = 50;

  void validate() const;
};

/// Step size for x += eta F / N^2 that keeps the quadratic confinement and
/// nearest-neighbour repulsion stable: about 0.1 N / (q_max^2 + q_max g_max).
double default_step_size(const GasSpec& spec, std::size_t n);

struct TraceRow {
  long step;
  double energy;
  double residual;
  double beta;  ///< +inf during the deterministic descent
};

struct MinimizeResult {
  Configuration config;
  std::vector<TraceRow> trace;
  bool converged = false;
  double energy = 0;
  double residual = 0;
  int descent_iterations = 0;
};

/// max_i |F_i| / (N^2 q_i max(1, g(q_i))); tangential part of F on a manifold.
double residual_force_norm(const Configuration& config, const GasSpec& spec);

/// Typical support radius used for initial scales and the collision guard.
double radius_estimate(const GasSpec& spec);

/// Gaussian cloud (or uniform manifold points) with charges drawn from nu.
Configuration initial_configuration(const GasSpec& spec, std::size_t n, std::uint64_t seed,
                                    SamplingMode mode = SamplingMode::iid);

/// One overdamped Langevin update with the collision guard; beta = +inf gives
/// plain gradient descent. Returns the new configuration.
Configuration langevin_step(const Configuration& config, const GasSpec& spec, double beta, double step,
                            std::uint64_t seed);

/// Called with the configuration after every accepted step.
using StepObserver = std::function<void(const Configuration&)>;

MinimizeResult minimize(const GasSpec& spec, std::size_t n, const AnnealSchedule& schedule, std::uint64_t seed,
                        SamplingMode mode = SamplingMode::iid, const StepObserver& observer = {});
MinimizeResult minimize_from(const GasSpec& spec, Configuration start, const AnnealSchedule& schedule,
                             std::uint64_t seed, const StepObserver& observer = {});

/// Independent replicas with seeds seed, seed + 1, ...; results do not depend
/// on the thread count.
std::vector<MinimizeResult> minimize_replicas(const GasSpec& spec, std::size_t n, const AnnealSchedule& schedule,
                                              std::uint64_t seed, std::size_t replicas, int threads = 1,
                                              SamplingMode mode = SamplingMode::iid);

/// Deterministic L-BFGS descent only (monotone energy). Used after annealing.
MinimizeResult descend(const GasSpec& spec, Configuration start, const AnnealSchedule& schedule,
                       const StepObserver& observer = {});

}  // namespace hgas
