#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hgas/charge_law.hpp"
#include "hgas/gas_spec.hpp"
#include "hgas/minimizer.hpp"

namespace hgas {

/// Serializable description of a gas. Weights, kernels and laws are named
/// families so that a document round-trips exactly.
struct GasConfig {
  int dimension = 2;
  std::string kernel = "coulomb";  ///< coulomb | riesz
  double eta = 0;
  std::string confinement = "quadratic";  ///< quadratic | quartic_minus_quadratic | coordinate_square
  int axis = 0;
  std::string weight = "constant";  ///< constant | linear | inverse_sqrt | inverse | sine_offset | power
  double weight_parameter = 1;      ///< value for constant, exponent for power
  std::string charges = "uniform";  ///< atomic | uniform | tabulated | csv
  std::vector<double> charge_values, charge_weights;  ///< atomic atoms or tabulated nodes
  double charge_min = 1, charge_max = 2;
  std::string charge_file;
  std::string manifold;  ///< "" | sphere | torus

  GasSpec build() const;
};

struct RunConfig {
  std::size_t n = 1000;
  std::uint64_t seed = 1;
  std::size_t replicas = 1;
  int threads = 1;
  std::string sampling = "iid";  ///< iid | stratified
  AnnealSchedule schedule;
  std::string resume;  ///< checkpoint to restart from (single replica)
};

struct AnalysisConfig {
  std::vector<std::string> observables{"radial", "ordering"};
  std::size_t bins = 32;
  std::vector<double> r0{0.2, 0.5, 0.8};  ///< fractions of the support radius
  double correlation_width = 0.1;         ///< fraction of the support radius
  double correlation_max = 4;             ///< largest blown-up distance
  std::size_t correlation_bins = 40;
  std::size_t nn_bins = 40;
};

struct OutputConfig {
  std::string directory = "out";
  std::vector<std::string> formats{"csv", "json"};
  std::string checkpoint = "csv";  ///< csv | binary | both | none
};

struct InverseConfig {
  std::string target = "fig7";  ///< fig7 | parabolic | path to an (r, f) CSV
  bool roundtrip = false;
  std::size_t bins = 0;  ///< 0: annuli two mean spacings wide
  double fraction = 0.95;
};

struct ScenarioConfig {
  std::string name = "custom";
  std::string description;
  GasConfig gas;
  RunConfig run;
  AnalysisConfig analysis;
  OutputConfig output;
  std::optional<InverseConfig> inverse;
};

/// Strict parser: unknown keys and missing required keys raise Errc::config
/// with the dotted path in the message.
ScenarioConfig parse_scenario(const std::string& json_text);
std::string serialize_scenario(const ScenarioConfig& config);

/// Applies `a.b.c=value` overrides to a JSON document before parsing. The
/// value is read as JSON when possible and as a string otherwise.
std::string apply_overrides(const std::string& json_text, const std::vector<std::string>& overrides);

std::vector<std::string> preset_names();
/// Preset document; throws Errc::config for unknown names.
ScenarioConfig preset(const std::string& name);

}  // namespace hgas
