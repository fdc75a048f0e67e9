#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hgas/charge_law.hpp"
#include "hgas/gas_spec.hpp"
#include "hgas/minimizer.hpp"

namespace hgas {

/// Target radial particle density f(r) on [0, R], with its derivative.
struct TargetDensity {
  std::string name;
  double support_radius = 1;
  std::function<double(double)> f;
  std::function<double(double)> df;

  /// (3 / 4 pi) (2 - r) on the unit disk
  static TargetDensity fig7();
  /// (2 / pi) (1 - r^2) on the unit disk
  static TargetDensity parabolic();
  /// Monotone piecewise-cubic (PCHIP) interpolation of samples (r_k, f_k), r_0 = 0.
  static TargetDensity tabulated(std::vector<double> r, std::vector<double> f, std::string name = "table");
  /// Two-column CSV (r, f); '#' lines and a non-numeric header are skipped.
  static TargetDensity from_csv(const std::string& path);

  /// f(0) finite and positive, f strictly decreasing and non-negative on [0, R].
  void validate() const;
};

/// Root of a(q) f(0) = 1 with a(q) = (k_d / d) q / g(q).
double saddle_charge(const TargetDensity& f, const WeightSpec& g, int d);

struct StepControl {
  double epsilon_scale = 1e-8;  ///< offset along the unstable direction, times R
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;
  double max_dr_fraction = 1.0 / 4000;  ///< sample spacing cap in r, times R
  double max_dq_fraction = 1.0 / 4000;  ///< sample spacing cap in q, times the saddle charge
  int max_steps = 200000;
};

/// The unstable manifold of the saddle, sampled densely in (q, r = xi^{1/d}).
struct ManifoldCurve {
  int dimension = 2;
  std::vector<double> q, r, mass;
  double saddle_q = 0;
  double q_min = 0, q_max = 0;
  double epsilon = 0;
  double unstable_eigenvalue = 0, stable_eigenvalue = 0;
  double eigenvector_q = 0, eigenvector_r = 1;
  bool g_increasing = false;
  double terminal_mass = 0;
  double terminal_radius = 0;
};

ManifoldCurve integrate_unstable_manifold(const TargetDensity& f, const WeightSpec& g, int d,
                                          const StepControl& control = {});

struct Reconstruction {
  ChargeDistribution law = ChargeDistribution::atomic({{1.0, 1.0}});
  std::vector<double> q, nu;  ///< normalized tabulation, q increasing
  double mass_before_normalization = 0;
  double q_min = 0, q_max = 0;
};

Reconstruction reconstruct_charge_density(const ManifoldCurve& curve, const TargetDensity& f, const WeightSpec& g);

/// Convenience: saddle, manifold and density in one call.
Reconstruction reconstruct(const TargetDensity& f, const WeightSpec& g, int d, const StepControl& control = {});

/// sup |rho_pred - f| / f(0) over r < fraction * R, for the equilibrium of the reconstructed gas.
double pushforward_error(const Reconstruction& rec, const TargetDensity& f, const WeightSpec& g, int d,
                         double fraction = 0.95, std::size_t points = 400);

struct RoundtripReport {
  Reconstruction reconstruction;
  std::size_t n = 0, replicas = 0;
  std::vector<double> r, empirical, target, se;  ///< bins inside r < fraction * R
  double rms_relative = 0;
  double sup_relative = 0;
  double ordering_mean = 0;
  int unconverged = 0;
};

/// Minimizes `replicas` gases with the reconstructed law and compares their
/// binned radial density with the bin averages of f on r < fraction * R.
/// bins = 0 uses spacing_edges on [0, fraction * R]; otherwise `bins`
/// equal-volume bins on [0, R].
RoundtripReport verify_roundtrip(const TargetDensity& f, const WeightSpec& g, GasParams base, std::size_t n,
                                 std::size_t replicas, std::uint64_t seed, const AnnealSchedule& schedule,
                                 int threads = 1, std::size_t bins = 0, double fraction = 0.95);

}  // namespace hgas
