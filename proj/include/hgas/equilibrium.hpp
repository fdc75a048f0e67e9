#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hgas/gas_spec.hpp"

namespace hgas {

struct ShellLayout {
  struct Shell {
    double charge;
    double fraction;
    double inner_radius;
    double outer_radius;
    double density;  ///< particles per unit volume inside the shell
  };
  int dimension = 2;
  std::vector<Shell> shells;  ///< sorted by radius
};

/// Radial mean-field minimizer, with every quantity a function of r = |x|.
struct EquilibriumProfile {
  enum class Order { uniform_disordered, ordered_increasing, ordered_decreasing };

  int dimension = 2;
  Order order = Order::uniform_disordered;
  double support_radius = 0;
  double mean_charge = 1;
  /// Radii where the densities may jump (shell edges, support edge).
  std::vector<double> breakpoints;

  std::function<double(double)> rho;    ///< particle density
  std::function<double(double)> rho_q;  ///< charge density
  std::function<double(double)> rho_qg; ///< q g(q) density
  /// Equilibrium charge at radius r; NaN where undefined (gaps, outside, disordered).
  std::function<double(double)> charge_at;
  /// A radius carrying charge q at equilibrium (inner edge for shells, 0 when disordered).
  std::function<double(double)> radius_of;
  /// Charge and particle mass inside the ball of radius r.
  std::function<double(double)> enclosed_charge;
  std::function<double(double)> enclosed_mass;
  /// Radius of a particle with charge q drawn from the conditional law, u in [0, 1].
  std::function<double(double, double)> sample_radius;

  std::optional<ShellLayout> shells;

  struct Table {
    std::vector<double> r, rho, rho_q, q;
  };
  /// Equal-volume grid (uniform in r^d) over [0, R].
  Table tabulate(std::size_t points = 2048) const;
};

std::string to_string(EquilibriumProfile::Order o);

/// Charge sets {q : g(q) = gamma} sampled over the range of g, for weights
/// where the charge-radius relation is not a function.
struct PartialPrediction {
  struct LevelSet {
    double gamma;
    std::vector<double> charges;
  };
  std::vector<LevelSet> level_sets;
  bool multi_valued = false;
};

struct Prediction {
  enum class Kind { profile, shells, partial };
  Kind kind = Kind::profile;
  std::optional<EquilibriumProfile> profile;
  std::optional<ShellLayout> shells;
  std::optional<PartialPrediction> partial;
};

EquilibriumProfile constant_g_profile(const GasSpec& spec);
ShellLayout shell_layout(const GasSpec& spec);
EquilibriumProfile continuous_profile(const GasSpec& spec);
EquilibriumProfile profile_from_shells(const GasSpec& spec, const ShellLayout& layout);
PartialPrediction partial_prediction(const GasSpec& spec, std::size_t levels = 64);

/// Routes on the weight tag and the form of the charge law.
Prediction predict(const GasSpec& spec);
/// The profile for any monotone or constant weight (shell layouts converted).
EquilibriumProfile predicted_profile(const GasSpec& spec);

}  // namespace hgas
