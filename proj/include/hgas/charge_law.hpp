#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace hgas {

/// Probability law nu of the charges, supported in [q_min, q_max] with q_min > 0.
class ChargeDistribution {
 public:
  struct Atom {
    double charge;
    double weight;
  };

  /// Finitely many charge values; weights must sum to 1.
  static ChargeDistribution atomic(std::vector<Atom> atoms);
  static ChargeDistribution uniform(double a, double b);
  /// Closed-form density on [qmin, qmax]; must integrate to 1 within 1e-10.
  static ChargeDistribution continuous(std::function<double(double)> density, double qmin, double qmax);
  /// Piecewise-linear density through the given nodes.
  static ChargeDistribution tabulated(std::vector<double> q, std::vector<double> density,
                                      bool renormalize = false);

  bool is_atomic() const noexcept { return atomic_; }
  double q_min() const noexcept { return qmin_; }
  double q_max() const noexcept { return qmax_; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }

  /// Density of the absolutely continuous part (0 for atomic laws).
  double density(double q) const;
  double cdf(double q) const;
  double quantile(double u) const;
  double mean() const noexcept { return mean_; }
  double second_moment() const noexcept { return second_; }
  /// Integral of f against nu.
  double expectation(const std::function<double(double)>& f) const;
  /// Integral of u dnu(u) over [a, b] (closed interval for atoms).
  double partial_first_moment(double a, double b) const;
  /// nu([a, b])
  double partial_mass(double a, double b) const;
  /// True when a continuous law vanishes on a sub-interval between charged regions.
  bool has_interior_gap() const;

 private:
  ChargeDistribution() = default;
  void build_tables();
  // Integral of density * u^power over [lo, hi] inside one cell.
  double cell_integral(std::size_t cell, double lo, double hi, int power) const;
  std::size_t cell_of(double q) const;
  double cumulative(double q, int power) const;

  bool atomic_ = false;
  bool linear_ = false;
  double qmin_ = 1.0, qmax_ = 1.0;
  std::vector<Atom> atoms_;
  std::function<double(double)> density_;
  std::vector<double> nodes_;   // cell boundaries
  std::vector<double> values_;  // density at nodes (tabulated laws)
  std::vector<double> mass_;    // cumulative mass at nodes
  std::vector<double> moment_;  // cumulative first moment at nodes
  double mean_ = 1.0, second_ = 1.0;
};

enum class SamplingMode { iid, stratified };

/// Draws n charges from the law.
///
/// Stratified mode is deterministic up to a seeded shuffle: atoms get
/// floor(n nu_i) copies plus largest remainders, continuous laws get the
/// quantiles at (k + 1/2) / n.
std::vector<double> sample_charges(const ChargeDistribution& law, std::size_t n, std::uint64_t seed,
                                   SamplingMode mode = SamplingMode::iid);

}  // namespace hgas
