#include "hgas/confinement.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "hgas/error.hpp"

namespace hgas {

ConfinementSpec ConfinementSpec::quadratic() { return ConfinementSpec(Family::quadratic, 0, "quadratic"); }

ConfinementSpec ConfinementSpec::quartic_minus_quadratic() {
  return ConfinementSpec(Family::quartic_minus_quadratic, 0, "quartic_minus_quadratic");
}

ConfinementSpec ConfinementSpec::coordinate_square(int axis) {
  if (axis < 0) throw Error(Errc::domain, "coordinate_square axis must be non-negative");
  return ConfinementSpec(Family::coordinate_square, axis, "coordinate_square");
}

ConfinementSpec ConfinementSpec::custom(ValueFn value, GradientFn gradient, std::string name) {
  if (!value || !gradient) throw Error(Errc::domain, "custom confinement needs value and gradient");
  ConfinementSpec c(Family::custom, 0, std::move(name));
  c.value_ = std::move(value);
  c.gradient_ = std::move(gradient);
  return c;
}

double ConfinementSpec::value(std::span<const double> x) const {
  switch (family_) {
    case Family::quadratic: {
      double s = 0;
      for (double v : x) s += v * v;
      return s;
    }
    case Family::quartic_minus_quadratic: {
      double s = 0;
      for (double v : x) s += 0.5 * v * v * v * v - v * v;
      return s;
    }
    case Family::coordinate_square:
      return x[axis_] * x[axis_];
    case Family::custom:
      return value_(x);
  }
  return 0;
}

void ConfinementSpec::gradient(std::span<const double> x, std::span<double> out) const {
  switch (family_) {
    case Family::quadratic:
      for (std::size_t k = 0; k < x.size(); ++k) out[k] = 2 * x[k];
      return;
    case Family::quartic_minus_quadratic:
      for (std::size_t k = 0; k < x.size(); ++k) out[k] = 2 * x[k] * x[k] * x[k] - 2 * x[k];
      return;
    case Family::coordinate_square:
      for (std::size_t k = 0; k < x.size(); ++k) out[k] = 0;
      out[axis_] = 2 * x[axis_];
      return;
    case Family::custom:
      gradient_(x, out);
      return;
  }
}

void ConfinementSpec::validate(int d, bool on_manifold) const {
  if (family_ == Family::coordinate_square) {
    if (axis_ >= d) throw Error(Errc::domain, "coordinate_square axis out of range");
    if (!on_manifold)
      throw Error(Errc::domain, "coordinate_square is not confining in R^d; use it on a manifold");
    return;
  }
  if (family_ != Family::custom || on_manifold) return;

  // Growth check: the minimum over sampled directions must keep increasing
  // and end far above the value at the origin.
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> n01;
  std::vector<double> x(d, 0.0);
  const double v0 = value_(x);
  if (!std::isfinite(v0)) throw Error(Errc::domain, "custom confinement is not finite at the origin");
  double prev = -INFINITY;
  for (double radius : {10.0, 100.0, 1000.0}) {
    double lo = INFINITY;
    for (int s = 0; s < 256; ++s) {
      double norm = 0;
      for (auto& v : x) {
        v = n01(rng);
        norm += v * v;
      }
      norm = std::sqrt(norm);
      for (auto& v : x) v *= radius / norm;
      lo = std::min(lo, value_(x));
    }
    if (!(lo > prev)) throw Error(Errc::domain, "custom confinement does not grow at infinity");
    prev = lo;
  }
  if (!(prev > v0 + 1.0)) throw Error(Errc::domain, "custom confinement does not grow at infinity");
}

}  // namespace hgas
