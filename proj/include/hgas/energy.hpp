#pragma once

#include <span>
#include <vector>

#include "hgas/configuration.hpp"
#include "hgas/equilibrium.hpp"
#include "hgas/gas_spec.hpp"

namespace hgas {

/// Energy and forces from one pass over the pairs. Forces are axis-major
/// like Configuration coordinates.
struct EnergyForces {
  double energy = 0;
  double pair_sum = 0;  ///< sum_{i<j} q_i q_j W(|x_i - x_j|)
  std::vector<double> forces;
  std::vector<double> min_r2;  ///< squared nearest-neighbour distance per particle
};

/// Smallest admissible pair distance before a configuration is declared singular.
inline constexpr double coincidence_guard = 1e-12;

/// With check_guard false, near-coincident pairs are reported through min_r2
/// instead of raising singular_configuration.
EnergyForces evaluate(const Configuration& config, const GasSpec& spec, bool want_energy = true,
                      bool check_guard = true);

/// H_N with the ordered-pair convention of the Hamiltonian.
double total_energy(const Configuration& config, const GasSpec& spec);
/// -grad H_N, axis-major (forces[k * N + i]).
std::vector<double> forces(const Configuration& config, const GasSpec& spec);

/// Phi(x) = int q' W(|x - x'|) dmu(q', x') at radius r.
double mean_field_potential(const EquilibriumProfile& profile, const GasSpec& spec, double r);
/// int int q q' W dmu dmu
double interaction_integral(const EquilibriumProfile& profile, const GasSpec& spec);
/// int q g(q) V dmu
double confinement_integral(const EquilibriumProfile& profile, const GasSpec& spec);
/// h(mu) = confinement_integral - interaction_integral
double intensive_energy(const EquilibriumProfile& profile, const GasSpec& spec);

/// g(q) V(x_q) - 2 Phi(x_q) at an equilibrium point of charge q.
double equilibrium_constant(const EquilibriumProfile& profile, const GasSpec& spec, double q);
/// zeta(q, x) = q g V / 2 - q Phi - q C(q) / 2, zero on the support.
double zeta(const EquilibriumProfile& profile, const GasSpec& spec, double q, std::span<const double> x);

struct SplitBreakdown {
  double leading = 0;              ///< N^2 h
  double zeta_term = 0;            ///< 2N sum zeta + marginal_correction
  double marginal_correction = 0;  ///< N sum q_i C(q_i) - N^2 (int qgV - 2 I_WW)
  double quadratic_remainder = 0;  ///< -(sum_{i!=j} qqW - 2N sum q Phi + N^2 I_WW)
  double total_check = 0;          ///< H_N evaluated directly
  double identity_residual = 0;    ///< |sum of terms - total| / max(1, |total|)
  double nlogn_coefficient = 0;    ///< (leading - total) / (N log N), d = 2 only
  double h = 0, interaction = 0;
  double quadrature_tolerance = 1e-9;
  std::size_t n = 0;
};

SplitBreakdown splitting_terms(const Configuration& config, const EquilibriumProfile& profile, const GasSpec& spec);

}  // namespace hgas
