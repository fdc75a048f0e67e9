#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hgas/configuration.hpp"

namespace hgas {

/// Ensemble radial profiles on equal-volume bins (uniform in r^d).
struct RadialHistogram {
  int dimension = 2;
  std::size_t replicas = 0;
  std::vector<double> edges;
  std::vector<double> rho, rho_se;
  std::vector<double> rho_q, rho_q_se;
  std::vector<double> mean_charge, mean_charge_se;  ///< NaN in empty bins
  std::vector<std::size_t> counts;                  ///< pooled over replicas
  std::vector<bool> empty;
  double bin_volume(std::size_t b) const;
  double center(std::size_t b) const { return 0.5 * (edges[b] + edges[b + 1]); }
};

/// r_max <= 0 uses the largest radius in the ensemble.
RadialHistogram radial_profiles(std::span<const Configuration> configs, std::size_t bins = 32, double r_max = 0);
RadialHistogram radial_profiles(std::span<const Configuration> configs, std::vector<double> edges);

/// Equal-width edges on [0, r_max], each annulus at least `rows` mean spacings
/// (|B_R| / n)^{1/d} wide. Narrower bins resolve the ring rows that form near
/// the support edge of a minimized gas rather than its density.
std::vector<double> spacing_edges(int d, std::size_t n, double support_radius, double r_max, double rows = 2);

struct Histogram {
  std::vector<double> edges;
  std::vector<std::size_t> counts;
  std::vector<double> density;  ///< normalized to unit area
};

Histogram histogram(std::span<const double> values, std::size_t bins, double lo, double hi);

/// Distance from every particle to its nearest neighbour, optionally scaled by N^{1/d}.
std::vector<double> nearest_neighbor_distances(const Configuration& config, bool blow_up = false);

/// Local maxima of a histogram density, left to right, ignoring peaks below
/// `min_fraction` of the global maximum.
std::vector<double> histogram_peaks(const Histogram& h, double min_fraction = 0.1);

struct CorrelationCurve {
  double r0 = 0;
  double width = 0;
  std::vector<double> edges;  ///< blown-up distance bins
  std::vector<double> g, se;
  double normalization = 0;   ///< mean local blown-up density
  std::size_t replicas = 0;
  std::size_t references = 0;
  double center(std::size_t b) const { return 0.5 * (edges[b] + edges[b + 1]); }
};

/// G(r0, r) from particles with ||x| - r0| < width / 2 and blown-up distances
/// N^{1/d} |x_j - x_i|, normalized so an uncorrelated gas gives 1.
CorrelationCurve local_pair_correlation(std::span<const Configuration> configs, double r0, double width,
                                        std::span<const double> edges, std::size_t min_references = 10);

/// Blown-up distance of the first maximum of G (parabolic refinement of the top bin).
double first_peak(const CorrelationCurve& c);

/// max over bins beyond the first of |G_a - G_b| / sqrt(se_a^2 + se_b^2).
double curve_discrepancy(const CorrelationCurve& a, const CorrelationCurve& b);

/// Spearman rank correlation with midranks for ties.
double spearman(std::span<const double> a, std::span<const double> b);
/// Spearman correlation between charge and radius (N >= 10, two distinct charges).
double ordering_metric(const Configuration& config);
/// Spearman correlation between charge and |x_axis|, used on manifolds.
double axis_ordering_metric(const Configuration& config, int axis);

}  // namespace hgas
