#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hgas/error.hpp"
#include "hgas/minimizer.hpp"
#include "hgas/stats.hpp"

using namespace hgas;
using doctest::Approx;

namespace {

Configuration uniform_disk(std::size_t n, std::uint64_t seed, double R = 1, bool random_charges = false) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> x(2 * n), q(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = R * std::sqrt(u(rng)), th = 2 * std::numbers::pi * u(rng);
    x[i] = r * std::cos(th);
    x[n + i] = r * std::sin(th);
    if (random_charges) q[i] = 1 + u(rng);
  }
  return Configuration(2, x, q);
}

}  // namespace

TEST_CASE("radial profiles of exact uniform samples") {
  std::vector<Configuration> cs;
  for (std::uint64_t s = 0; s < 20; ++s) cs.push_back(uniform_disk(1000, s, 1, true));
  const auto h = radial_profiles(cs, 16, 1.0);
  CHECK(h.replicas == 20);
  double mass = 0, charge = 0;
  for (std::size_t b = 0; b < 16; ++b) {
    CHECK(h.bin_volume(b) == Approx(std::numbers::pi / 16));
    CHECK(std::abs(h.rho[b] - 1 / std::numbers::pi) < 3.5 * h.rho_se[b]);
    mass += h.rho[b] * h.bin_volume(b);
    charge += h.rho_q[b] * h.bin_volume(b);
  }
  CHECK(mass == Approx(1.0).epsilon(1e-12));
  double qbar = 0;
  for (const auto& c : cs)
    for (double q : c.charges()) qbar += q;
  qbar /= 20000;
  CHECK(charge == Approx(qbar).epsilon(1e-12));
}

TEST_CASE("explicit edges and spacing annuli") {
  // R = 1, n = 1000: spacing sqrt(pi / 1000) = 0.056, so [0, 0.9] holds 8 annuli.
  const auto e = spacing_edges(2, 1000, 1.0, 0.9);
  REQUIRE(e.size() == 9);
  CHECK(e.back() == 0.9);
  CHECK(e[1] - e[0] >= 2 * std::sqrt(std::numbers::pi / 1000));
  CHECK(spacing_edges(2, 4, 1.0, 0.1).size() == 2);
  std::vector<Configuration> cs;
  for (std::uint64_t s = 0; s < 10; ++s) cs.push_back(uniform_disk(2000, s));
  const auto a = radial_profiles(cs, 8, 1.0);
  const auto b = radial_profiles(cs, a.edges);
  for (std::size_t k = 0; k < 8; ++k) {
    CHECK(a.counts[k] == b.counts[k]);
    CHECK(a.rho[k] == Approx(b.rho[k]));
  }
  const auto h = radial_profiles(cs, e);
  for (std::size_t k = 0; k < h.rho.size(); ++k) {
    const double expected = 20000 * (e[k + 1] * e[k + 1] - e[k] * e[k]);
    CHECK(std::abs(static_cast<double>(h.counts[k]) - expected) < 4 * std::sqrt(expected));
  }
  CHECK_THROWS_AS(radial_profiles(cs, std::vector<double>{0, 0.5, 0.5}), Error);
}

TEST_CASE("particles on one circle occupy one bin") {
  const std::size_t n = 50;
  std::vector<double> x(2 * n), q(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = 0.5 * std::cos(0.1 * i);
    x[n + i] = 0.5 * std::sin(0.1 * i);
  }
  const Configuration c(2, x, q);
  const auto h = radial_profiles(std::span(&c, 1), 10, 1.0);
  int occupied = 0;
  for (std::size_t b = 0; b < 10; ++b) {
    if (h.counts[b]) ++occupied;
    CHECK(h.empty[b] == (h.counts[b] == 0));
    if (h.empty[b]) CHECK(std::isnan(h.mean_charge[b]));
  }
  CHECK(occupied == 1);
}

TEST_CASE("nearest neighbours on a square lattice") {
  std::vector<double> x(200), q(100, 1.0);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      x[i * 10 + j] = i;
      x[100 + i * 10 + j] = j;
    }
  const Configuration c(2, x, q);
  for (double d : nearest_neighbor_distances(c)) CHECK(d == Approx(1.0));
  for (double d : nearest_neighbor_distances(c, true)) CHECK(d == Approx(10.0));
}

TEST_CASE("histogram peaks") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> a(1, 0.05), b(2, 0.05), c(3, 0.05);
  std::vector<double> v;
  for (int k = 0; k < 3000; ++k) v.push_back(a(rng));
  for (int k = 0; k < 2000; ++k) v.push_back(b(rng));
  for (int k = 0; k < 1000; ++k) v.push_back(c(rng));
  const auto h = histogram(v, 60, 0, 4);
  double area = 0;
  for (std::size_t k = 0; k < 60; ++k) area += h.density[k] * (h.edges[k + 1] - h.edges[k]);
  CHECK(area == Approx(1.0));
  const auto peaks = histogram_peaks(h);
  REQUIRE(peaks.size() == 3);
  CHECK(peaks[0] == Approx(1).epsilon(0.05));
  CHECK(peaks[1] == Approx(2).epsilon(0.05));
  CHECK(peaks[2] == Approx(3).epsilon(0.05));
}

TEST_CASE("Poisson points have a flat pair correlation") {
  std::vector<Configuration> cs;
  for (std::uint64_t s = 0; s < 40; ++s) cs.push_back(uniform_disk(1000, 100 + s, 2));
  std::vector<double> edges;
  for (int k = 0; k <= 16; ++k) edges.push_back(0.25 * k);
  for (double r0 : {0.5, 1.0}) {
    const auto G = local_pair_correlation(cs, r0, 0.2, edges);
    CHECK(G.references > 100);
    for (std::size_t b = 1; b < G.g.size(); ++b) CHECK(std::abs(G.g[b] - 1) < 3.5 * G.se[b]);
  }
  std::vector<double> tiny_edges{0, 1, 2};
  CHECK_THROWS_AS(local_pair_correlation(std::span(cs.data(), 1), 1.0, 1e-4, tiny_edges), InsufficientStatistics);
}

TEST_CASE("first peak of a synthetic curve") {
  CorrelationCurve c;
  for (int k = 0; k <= 20; ++k) c.edges.push_back(0.1 * k);
  for (int k = 0; k < 20; ++k) {
    const double r = c.center(k);
    c.g.push_back(std::exp(-(r - 1.02) * (r - 1.02) / 0.02) + 0.5);
    c.se.push_back(0.01);
  }
  CHECK(first_peak(c) == Approx(1.02).epsilon(0.02));
  CHECK(curve_discrepancy(c, c) == 0);
}

TEST_CASE("spearman and the ordering metric") {
  std::vector<double> a{1, 2, 3, 4, 5}, b{5, 6, 7, 8, 100}, c{1, 1, 2, 2, 3};
  CHECK(spearman(a, b) == Approx(1.0));
  CHECK(spearman(a, c) == Approx(0.9486832980505138));
  std::vector<double> flat(5, 1.0);
  CHECK_THROWS_AS(spearman(a, flat), Error);

  const std::size_t n = 20;
  std::vector<double> x(2 * n, 0.0), q(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = 0.1 * (i + 1);
    q[i] = 100.0 - i;
  }
  const Configuration dec(2, x, q);
  CHECK(ordering_metric(dec) == Approx(-1.0));
  // Rotations and relabeling leave it unchanged.
  std::vector<double> xr(2 * n), qr(n);
  for (std::size_t i = 0; i < n; ++i) {
    qr[i] = q[n - 1 - i];
    xr[i] = std::cos(1.0) * x[n - 1 - i];
    xr[n + i] = std::sin(1.0) * x[n - 1 - i];
  }
  CHECK(ordering_metric(Configuration(2, xr, qr)) == Approx(-1.0));

  Configuration same(2, x, std::vector<double>(n, 2.0));
  try {
    ordering_metric(same);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::undefined_metric);
  }
  // Charges independent of position.
  int small = 0;
  for (std::uint64_t s = 0; s < 50; ++s) small += std::abs(ordering_metric(uniform_disk(1000, s, 1, true))) < 0.1;
  CHECK(small == 50);
}

TEST_CASE("two-species nearest-neighbour histogram") {
  GasParams p;
  p.charge_law = ChargeDistribution::atomic({{1, 0.9}, {3, 0.1}});
  const GasSpec spec(p);
  AnnealSchedule s;
  s.stages = 0;
  std::vector<double> d;
  for (const auto& r : minimize_replicas(spec, 500, s, 1, 4)) {
    const auto nn = nearest_neighbor_distances(r.config, true);
    d.insert(d.end(), nn.begin(), nn.end());
  }
  const auto h = histogram(d, 40, 0, 4);
  const auto peaks = histogram_peaks(h, 0.02);
  CHECK(peaks.size() >= 2);
  CHECK(peaks.front() < peaks.back());
}
