#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hgas/minimizer.hpp"
#include "hgas/scenario.hpp"

namespace hgas {

/// Progress messages; the default writes nothing.
using Logger = std::function<void(const std::string&)>;

struct SimulationResult {
  std::vector<MinimizeResult> runs;
  std::size_t unconverged = 0;
};

/// Each command writes its artifacts under config.output.directory.
SimulationResult run_simulate(const ScenarioConfig& config, const Logger& log = {});
void run_predict(const ScenarioConfig& config, const Logger& log = {});
void run_inverse(const ScenarioConfig& config, const Logger& log = {});
void run_stats(const ScenarioConfig& config, const std::vector<Configuration>& configs, const Logger& log = {});
void run_splitting(const ScenarioConfig& config, const std::vector<Configuration>& configs, const Logger& log = {});
/// simulate + stats + predict (+ splitting, + inverse when configured).
/// Throws Errc::convergence at the end when a replica did not converge.
void run_scenario(const ScenarioConfig& config, const Logger& log = {});

/// Checkpoints written by run_simulate in a directory, in replica order.
std::vector<Configuration> load_checkpoints(const std::string& directory);

}  // namespace hgas
