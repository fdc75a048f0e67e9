#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hgas/energy.hpp"
#include "hgas/equilibrium.hpp"
#include "hgas/error.hpp"
#include "hgas/minimizer.hpp"

using namespace hgas;
using doctest::Approx;

namespace {

GasSpec make_spec(int d, KernelSpec kernel = KernelSpec::coulomb(), WeightSpec w = WeightSpec::constant(1),
                  ChargeDistribution law = ChargeDistribution::atomic({{1.0, 1.0}})) {
  GasParams p;
  p.dimension = d;
  p.kernel = kernel;
  p.weight = w;
  p.charge_law = law;
  return GasSpec(p);
}

Configuration random_config(int d, std::size_t n, std::uint64_t seed, double qmin = 1, double qmax = 2) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> uni(qmin, qmax);
  std::vector<double> x(d * n), q(n);
  for (auto& v : x) v = gauss(rng);
  for (auto& v : q) v = uni(rng);
  return Configuration(d, x, q);
}

}  // namespace

TEST_CASE("hand-evaluated energies") {
  const auto spec = make_spec(2);
  Configuration one(2, {0.0, 0.0}, {1.0});
  CHECK(total_energy(one, spec) == 0);
  Configuration two(2, {-0.5, 0.5, 0.0, 0.0}, {1.0, 1.0});
  CHECK(total_energy(two, spec) == Approx(1.0).epsilon(1e-14));
  // Pair sum uses unordered pairs.
  const auto ef = evaluate(two, spec);
  CHECK(ef.pair_sum == Approx(0.0).epsilon(1e-14));
  // Forces on the symmetric pair are opposite and along the x axis.
  const auto f = forces(two, spec);
  CHECK(f[0] == Approx(-f[1]));
  CHECK(f[2] == 0);
  CHECK(f[3] == 0);
}

TEST_CASE("single particle at the origin feels no force") {
  const auto spec = make_spec(3);
  Configuration one(3, {0.0, 0.0, 0.0}, {1.0});
  for (double v : forces(one, spec)) CHECK(v == 0);
}

TEST_CASE("coincident particles are rejected") {
  const auto spec = make_spec(2);
  Configuration c(2, {0.3, 0.3, 0.1, 0.1}, {1.0, 1.0});
  CHECK_THROWS_AS(total_energy(c, spec), Error);
  try {
    total_energy(c, spec);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::singular_configuration);
  }
}

TEST_CASE("energy is invariant under relabeling and rotation") {
  const auto spec = make_spec(2, KernelSpec::coulomb(), WeightSpec::linear(), ChargeDistribution::uniform(1, 2));
  auto c = random_config(2, 40, 7);
  const double e0 = total_energy(c, spec);
  // Reverse the labels.
  std::vector<double> x(c.coords().begin(), c.coords().end()), q(c.charges().begin(), c.charges().end());
  std::vector<double> xr(x.size()), qr(q.size());
  const std::size_t n = q.size();
  for (std::size_t i = 0; i < n; ++i) {
    qr[i] = q[n - 1 - i];
    xr[i] = x[n - 1 - i];
    xr[n + i] = x[2 * n - 1 - i];
  }
  CHECK(total_energy(Configuration(2, xr, qr), spec) == Approx(e0).epsilon(1e-12));
  const double th = 0.7;
  std::vector<double> xo(x.size());
  for (std::size_t i = 0; i < n; ++i) {
    xo[i] = std::cos(th) * x[i] - std::sin(th) * x[n + i];
    xo[n + i] = std::sin(th) * x[i] + std::cos(th) * x[n + i];
  }
  CHECK(total_energy(Configuration(2, xo, q), spec) == Approx(e0).epsilon(1e-12));
}

TEST_CASE("forces match central differences of the energy") {
  struct Case {
    int d;
    KernelSpec k;
  };
  const Case cases[] = {{2, KernelSpec::coulomb()},     {3, KernelSpec::coulomb()},
                        {2, KernelSpec::riesz(0.5)},    {2, KernelSpec::riesz(-0.5)},
                        {3, KernelSpec::riesz(0.5)},    {3, KernelSpec::riesz(-0.5)}};
  for (const auto& cs : cases) {
    const auto spec = make_spec(cs.d, cs.k, WeightSpec::linear(), ChargeDistribution::uniform(1, 2));
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      auto c = random_config(cs.d, 12, 100 + seed);
      const auto f = forces(c, spec);
      double worst = 0, scale = 0;
      for (double v : f) scale = std::max(scale, std::abs(v));
      for (std::size_t i = 0; i < c.size(); ++i)
        for (int k = 0; k < cs.d; ++k) {
          const double h = 1e-6, x0 = c.coord(i, k);
          c.coord(i, k) = x0 + h;
          const double ep = total_energy(c, spec);
          c.coord(i, k) = x0 - h;
          const double em = total_energy(c, spec);
          c.coord(i, k) = x0;
          const double fd = -(ep - em) / (2 * h);
          worst = std::max(worst, std::abs(fd - f[k * c.size() + i]) / std::max(std::abs(fd), 1e-3 * scale));
        }
      CHECK(worst < 1e-5);
    }
  }
}

TEST_CASE("mean-field potential of the uniform disk") {
  const auto spec = make_spec(2);
  const auto prof = constant_g_profile(spec);
  CHECK(prof.support_radius == Approx(1.0));
  CHECK(mean_field_potential(prof, spec, 0.0) == Approx(-0.5).epsilon(1e-9));
  CHECK(mean_field_potential(prof, spec, 1.0) == Approx(0.0).scale(1).epsilon(1e-9));
  CHECK(mean_field_potential(prof, spec, std::numbers::e) == Approx(1.0).epsilon(1e-9));
  // Shell theorem: dPhi/dr = c enclosed / r^{d-1}.
  for (double r : {0.2, 0.5, 0.9}) {
    const double h = 1e-5;
    const double dphi = (mean_field_potential(prof, spec, r + h) - mean_field_potential(prof, spec, r - h)) / (2 * h);
    CHECK(dphi == Approx(prof.enclosed_charge(r) / r).epsilon(1e-6));
  }
}

TEST_CASE("mean-field potential far field and d = 3") {
  const auto law = ChargeDistribution::uniform(1, 2);
  for (int d : {2, 3}) {
    const auto spec = make_spec(d, KernelSpec::coulomb(), WeightSpec::constant(1), law);
    const auto prof = constant_g_profile(spec);
    const double r = 100 * prof.support_radius;
    const double far = law.mean() * kernel_value(spec.kernel(), d, r);
    CHECK(std::abs(mean_field_potential(prof, spec, r) - far) < 1e-3 * std::abs(far));
  }
}

TEST_CASE("mean-field potential for a Riesz kernel uses quadrature") {
  // Homogeneous ball, compare with a direct Monte-Carlo average of W.
  const auto spec = make_spec(2, KernelSpec::riesz(0.5));
  const auto prof = constant_g_profile(make_spec(2));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  const double R = prof.support_radius;
  for (double r : {0.0, 0.6, 2.0}) {
    double sum = 0, sum2 = 0;
    const int m = 400000;
    for (int k = 0; k < m; ++k) {
      const double rr = R * std::sqrt(u(rng)), th = 2 * std::numbers::pi * u(rng);
      const double w = kernel_value(spec.kernel(), 2, std::hypot(rr * std::cos(th) - r, rr * std::sin(th)));
      sum += w;
      sum2 += w * w;
    }
    const double mean = sum / m, se = std::sqrt((sum2 / m - mean * mean) / m);
    CHECK(std::abs(mean_field_potential(prof, spec, r) - mean) < 4 * se);
  }
}

TEST_CASE("intensive energy pieces") {
  const auto spec = make_spec(2);
  const auto prof = constant_g_profile(spec);
  CHECK(confinement_integral(prof, spec) == Approx(0.5).epsilon(1e-8));
  // Mean log distance of two uniform points in the unit disk is -1/4.
  CHECK(interaction_integral(prof, spec) == Approx(-0.25).epsilon(1e-8));
  CHECK(intensive_energy(prof, spec) == Approx(0.75).epsilon(1e-8));

  // q = 2: charge density 1/pi on the disk of radius sqrt 2.
  const auto spec2 = make_spec(2, KernelSpec::coulomb(), WeightSpec::constant(1),
                               ChargeDistribution::atomic({{2.0, 1.0}}));
  const auto prof2 = constant_g_profile(spec2);
  CHECK(prof2.support_radius == Approx(std::sqrt(2.0)));
  CHECK(confinement_integral(prof2, spec2) == Approx(2.0).epsilon(1e-8));
  CHECK(interaction_integral(prof2, spec2) == Approx(4 * (-0.25 + std::log(std::sqrt(2.0)))).epsilon(1e-8));
}

TEST_CASE("zeta vanishes on the support and is positive outside") {
  const auto spec = make_spec(2, KernelSpec::coulomb(), WeightSpec::linear(), ChargeDistribution::uniform(1, 2));
  const auto prof = continuous_profile(spec);
  for (double q : {1.1, 1.5, 1.9}) {
    const double r = prof.radius_of(q);
    const double x[2] = {r, 0};
    CHECK(std::abs(zeta(prof, spec, q, x)) < 1e-8);
    // Tangent and radial gradient both vanish at the equilibrium radius.
    const double h = 1e-5;
    const double xp[2] = {r + h, 0}, xm[2] = {r - h, 0};
    CHECK(std::abs((zeta(prof, spec, q, xp) - zeta(prof, spec, q, xm)) / (2 * h)) < 1e-5);
    const double far[2] = {0, 2 * prof.support_radius};
    CHECK(zeta(prof, spec, q, far) > 0);
  }
  const double x[2] = {0, 0};
  CHECK_THROWS_AS(zeta(prof, spec, 5.0, x), Error);

  const auto uspec = make_spec(2);
  const auto uprof = constant_g_profile(uspec);
  const double out[2] = {2, 0};
  CHECK(zeta(uprof, uspec, 1.0, out) > 0);
  const double in[2] = {0.3, 0.4};
  CHECK(std::abs(zeta(uprof, uspec, 1.0, in)) < 1e-9);
}

TEST_CASE("splitting identity holds for arbitrary configurations") {
  const auto spec = make_spec(2, KernelSpec::coulomb(), WeightSpec::linear(), ChargeDistribution::uniform(1, 2));
  const auto prof = continuous_profile(spec);
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto c = random_config(2, 150, seed);
    const auto s = splitting_terms(c, prof, spec);
    CHECK(s.identity_residual < 1e-6);
    CHECK(std::abs(s.leading + s.zeta_term + s.quadratic_remainder - s.total_check) <
          1e-6 * std::abs(s.total_check));
  }
  const auto hspec = make_spec(3);
  const auto hprof = constant_g_profile(hspec);
  const auto s = splitting_terms(random_config(3, 80, 9, 1, 1), hprof, hspec);
  CHECK(s.identity_residual < 1e-6);
}

TEST_CASE("minimized configurations have a smaller quadratic remainder than i.i.d. samples") {
  const auto spec = make_spec(2, KernelSpec::coulomb(), WeightSpec::constant(1), ChargeDistribution::uniform(1, 2));
  const auto prof = constant_g_profile(spec);
  const std::size_t n = 200;
  AnnealSchedule sched;
  sched.stages = 0;
  const auto min = minimize(spec, n, sched, 5);
  // i.i.d. sample from the equilibrium measure.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> x(2 * n), q = sample_charges(spec.charge_law(), n, 12);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = prof.support_radius * std::sqrt(u(rng)), th = 2 * std::numbers::pi * u(rng);
    x[i] = r * std::cos(th);
    x[n + i] = r * std::sin(th);
  }
  const auto a = splitting_terms(min.config, prof, spec);
  const auto b = splitting_terms(Configuration(2, x, q), prof, spec);
  CHECK(a.quadratic_remainder < b.quadratic_remainder);
}
