#include "hgas/weight.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "hgas/error.hpp"

namespace hgas {

std::string to_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::increasing: return "increasing";
    case Monotonicity::decreasing: return "decreasing";
    case Monotonicity::constant: return "constant";
    case Monotonicity::non_monotonic: return "non_monotonic";
  }
  return "unknown";
}

WeightSpec WeightSpec::constant(double c) {
  if (!(c > 0)) throw Error(Errc::invalid_weight, "constant weight must be positive");
  return WeightSpec(Family::constant, c, Monotonicity::constant, "constant");
}
WeightSpec WeightSpec::linear() { return WeightSpec(Family::linear, 1, Monotonicity::increasing, "linear"); }
WeightSpec WeightSpec::inverse_sqrt() {
  return WeightSpec(Family::inverse_sqrt, -0.5, Monotonicity::decreasing, "inverse_sqrt");
}
WeightSpec WeightSpec::inverse() { return WeightSpec(Family::inverse, -1, Monotonicity::decreasing, "inverse"); }
WeightSpec WeightSpec::sine_offset() {
  return WeightSpec(Family::sine_offset, 0, Monotonicity::non_monotonic, "sine_offset");
}
WeightSpec WeightSpec::power(double p) {
  Monotonicity m = p > 0 ? Monotonicity::increasing : p < 0 ? Monotonicity::decreasing : Monotonicity::constant;
  return WeightSpec(Family::power, p, m, "power");
}

WeightSpec WeightSpec::custom(Fn value, Fn derivative, std::optional<Monotonicity> tag, std::string name) {
  if (!value) throw Error(Errc::invalid_weight, "custom weight needs a value function");
  WeightSpec w(Family::custom, 0, tag, std::move(name));
  w.value_ = std::move(value);
  w.derivative_ = std::move(derivative);
  return w;
}

double WeightSpec::value(double q) const {
  switch (family_) {
    case Family::constant: return param_;
    case Family::linear: return q;
    case Family::inverse_sqrt: return 1 / std::sqrt(q);
    case Family::inverse: return 1 / q;
    case Family::sine_offset: return 2 + std::sin(std::numbers::pi * q / 3);
    case Family::power: return std::pow(q, param_);
    case Family::custom: return value_(q);
  }
  return 0;
}

double WeightSpec::derivative(double q) const {
  switch (family_) {
    case Family::constant: return 0;
    case Family::linear: return 1;
    case Family::inverse_sqrt: return -0.5 / (q * std::sqrt(q));
    case Family::inverse: return -1 / (q * q);
    case Family::sine_offset: return std::numbers::pi / 3 * std::cos(std::numbers::pi * q / 3);
    case Family::power: return param_ * std::pow(q, param_ - 1);
    case Family::custom: {
      if (derivative_) return derivative_(q);
      const double h = 1e-6 * std::max(1.0, std::abs(q));
      return (value_(q + h) - value_(q - h)) / (2 * h);
    }
  }
  return 0;
}

void WeightSpec::validate_on(double qmin, double qmax) const {
  constexpr int samples = 257;
  int pos = 0, neg = 0;
  for (int k = 0; k < samples; ++k) {
    const double q = qmin + (qmax - qmin) * k / (samples - 1.0);
    const double g = value(q);
    if (!(g > 0) || !std::isfinite(g))
      throw Error(Errc::invalid_weight, "weight must be positive on the charge support (q=" + std::to_string(q) + ")");
    if (qmax > qmin) {
      const double dg = derivative(q);
      const double scale = 1e-12 * std::max(1.0, std::abs(g));
      if (dg > scale) ++pos;
      if (dg < -scale) ++neg;
    }
  }
  if (!tag_ || qmax == qmin) return;
  bool ok = true;
  switch (*tag_) {
    case Monotonicity::increasing: ok = neg == 0 && pos > 0; break;
    case Monotonicity::decreasing: ok = pos == 0 && neg > 0; break;
    case Monotonicity::constant: ok = pos == 0 && neg == 0; break;
    case Monotonicity::non_monotonic: ok = pos > 0 && neg > 0; break;
  }
  if (!ok)
    throw Error(Errc::invalid_weight,
                "weight tag '" + to_string(*tag_) + "' disagrees with the sampled sign of g'");
}

double weight_eval(const WeightSpec& w, double q) {
  const double g = w.value(q);
  if (!(g > 0) || !std::isfinite(g)) throw Error(Errc::invalid_weight, "weight is not positive at q=" + std::to_string(q));
  return g;
}

}  // namespace hgas
