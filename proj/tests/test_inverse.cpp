#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

#include "hgas/equilibrium.hpp"
#include "hgas/error.hpp"
#include "hgas/inverse.hpp"

using namespace hgas;
using doctest::Approx;

namespace {

// f(r) = A (1 + alpha (1 - r^m)) on the unit disk, normalized in d = 2.
TargetDensity family(double alpha, double m) {
  const double pi = std::numbers::pi;
  const double A = 1 / (pi * (1 + alpha * m / (m + 2)));
  TargetDensity t;
  t.name = "family";
  t.support_radius = 1;
  t.f = [=](double r) { return r <= 1 ? A * (1 + alpha * (1 - std::pow(r, m))) : 0.0; };
  t.df = [=](double r) { return r <= 1 ? -A * alpha * m * std::pow(r, m - 1) : 0.0; };
  return t;
}

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::internal_consistency;
}

}  // namespace

TEST_CASE("saddle charges") {
  const double q7 = saddle_charge(TargetDensity::fig7(), WeightSpec::inverse(), 2);
  CHECK(std::abs(q7 - std::sqrt(2.0 / 3)) < 1e-12);
  const double qp = saddle_charge(TargetDensity::parabolic(), WeightSpec::inverse(), 2);
  CHECK(std::abs(qp - std::sqrt(0.5)) < 1e-12);
  // g -> c g rescales a by 1 / c: pi q^2 / c * 3 / (2 pi) = 1.
  const double c = 4;
  auto scaled = WeightSpec::custom([c](double q) { return c / q; }, [c](double q) { return -c / (q * q); },
                                   Monotonicity::decreasing);
  CHECK(std::abs(saddle_charge(TargetDensity::fig7(), scaled, 2) - std::sqrt(2 * c / 3)) < 1e-11);
  CHECK(code_of([] { saddle_charge(TargetDensity::fig7(), WeightSpec::linear(), 2); }) == Errc::incompatible_target);
}

TEST_CASE("fig7 reconstruction") {
  const auto f = TargetDensity::fig7();
  const auto w = WeightSpec::inverse();
  const auto curve = integrate_unstable_manifold(f, w, 2);
  CHECK(curve.unstable_eigenvalue > 0);
  CHECK(curve.stable_eigenvalue < 0);
  CHECK(curve.terminal_radius == Approx(1.0).epsilon(1e-6));
  CHECK(curve.terminal_mass == Approx(1.0).epsilon(1e-6));
  for (std::size_t k = 1; k < curve.q.size(); ++k) {
    CHECK(curve.r[k] > curve.r[k - 1]);
    CHECK(curve.q[k] > curve.q[k - 1]);
  }
  const auto rec = reconstruct_charge_density(curve, f, w);
  CHECK(std::abs(rec.q_min - std::sqrt(2.0 / 3)) < 1e-6);
  CHECK(std::abs(rec.mass_before_normalization - 1) < 1e-4);
  for (double v : rec.nu) CHECK(v >= 0);
  CHECK(pushforward_error(rec, f, w, 2) < 1e-3);

  // Halving epsilon barely moves nu.
  StepControl half;
  half.epsilon_scale *= 0.5;
  const auto rec2 = reconstruct(f, w, 2, half);
  double sup = 0;
  for (int k = 0; k <= 500; ++k) {
    const double q = rec.q_min + (rec.q_max - rec.q_min) * k / 500.0;
    sup = std::max(sup, std::abs(rec.law.density(q) - rec2.law.density(q)));
  }
  CHECK(sup < 1e-4);
}

TEST_CASE("parabolic target and tabulated targets") {
  const auto w = WeightSpec::inverse_sqrt();
  const auto rec = reconstruct(TargetDensity::parabolic(), w, 2);
  CHECK(pushforward_error(rec, TargetDensity::parabolic(), w, 2) < 1e-3);

  std::vector<double> r, f;
  const auto ref = TargetDensity::fig7();
  for (int k = 0; k <= 40; ++k) {
    r.push_back(k / 40.0);
    f.push_back(ref.f(k / 40.0));
  }
  const auto tab = TargetDensity::tabulated(r, f);
  CHECK(tab.f(0.333) == Approx(ref.f(0.333)).epsilon(1e-10));
  CHECK(saddle_charge(tab, WeightSpec::inverse(), 2) == Approx(std::sqrt(2.0 / 3)).epsilon(1e-12));

  const char* path = "test_inverse_target.csv";
  {
    std::ofstream out(path);
    out << "r,f\n";
    for (std::size_t k = 0; k < r.size(); ++k) out << r[k] << ',' << f[k] << '\n';
  }
  const auto csv = TargetDensity::from_csv(path);
  std::remove(path);
  CHECK(csv.support_radius == 1);
  const auto rc = reconstruct(csv, WeightSpec::inverse(), 2);
  CHECK(std::abs(rc.q_min - std::sqrt(2.0 / 3)) < 1e-6);
}

TEST_CASE("increasing weights integrate in the reversed orientation") {
  const auto f = TargetDensity::fig7();
  const auto w = WeightSpec::power(2);
  const auto curve = integrate_unstable_manifold(f, w, 2);
  CHECK(curve.g_increasing);
  for (std::size_t k = 1; k < curve.q.size(); ++k) CHECK(curve.q[k] < curve.q[k - 1]);
  const auto rec = reconstruct_charge_density(curve, f, w);
  CHECK(rec.q_max == Approx(curve.saddle_q));
  CHECK(pushforward_error(rec, f, w, 2) < 1e-3);
  // g = sqrt(q) with a' > 0 gives an unstable node.
  CHECK(code_of([&] { integrate_unstable_manifold(f, WeightSpec::power(0.5), 2); }) == Errc::incompatible_target);
}

TEST_CASE("random admissible pairs are saddles and reconstruct") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> alpha(0.2, 3), m(1, 4), p(1.2, 3);
  for (int k = 0; k < 50; ++k) {
    const auto f = family(alpha(rng), m(rng));
    const WeightSpec w = k % 3 == 0   ? WeightSpec::power(p(rng))
                         : k % 3 == 1 ? WeightSpec::power(-p(rng))
                                      : WeightSpec::inverse_sqrt();
    const auto curve = integrate_unstable_manifold(f, w, 2);
    CHECK(curve.unstable_eigenvalue * curve.stable_eigenvalue < 0);
    if (k < 10) {
      const auto rec = reconstruct_charge_density(curve, f, w);
      CHECK(pushforward_error(rec, f, w, 2) < 1e-3);
    }
  }
}

TEST_CASE("targets that are not strictly decreasing are rejected") {
  TargetDensity flat;
  flat.support_radius = 1;
  flat.f = [](double r) { return r <= 1 ? 1 / std::numbers::pi : 0.0; };
  flat.df = [](double) { return 0.0; };
  CHECK(code_of([&] { reconstruct(flat, WeightSpec::inverse(), 2); }) == Errc::incompatible_target);
  TargetDensity up;
  up.support_radius = 1;
  up.f = [](double r) { return r <= 1 ? (1 + r) : 0.0; };
  up.df = [](double) { return 1.0; };
  CHECK(code_of([&] { reconstruct(up, WeightSpec::inverse(), 2); }) == Errc::incompatible_target);
  // Too little mass in the support.
  TargetDensity thin = family(1, 2);
  auto base = thin.f;
  thin.f = [base](double r) { return 0.5 * base(r); };
  auto based = thin.df;
  thin.df = [based](double r) { return 0.5 * based(r); };
  CHECK(code_of([&] { reconstruct(thin, WeightSpec::inverse(), 2); }) == Errc::incompatible_target);
  CHECK(code_of([] { TargetDensity::tabulated({0, 1}, {1, 0.5}); }) == Errc::incompatible_target);
}
