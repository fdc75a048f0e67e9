#pragma once

#include <functional>
#include <optional>
#include <string>

namespace hgas {

enum class Monotonicity { increasing, decreasing, constant, non_monotonic };

std::string to_string(Monotonicity m);

/// Charge-dependent weight g(q) of the confinement.
class WeightSpec {
 public:
  enum class Family { constant, linear, inverse_sqrt, inverse, sine_offset, power, custom };

  using Fn = std::function<double(double)>;

  static WeightSpec constant(double c = 1.0);
  static WeightSpec linear();
  static WeightSpec inverse_sqrt();
  static WeightSpec inverse();
  /// g(q) = 2 + sin(pi q / 3)
  static WeightSpec sine_offset();
  /// g(q) = q^p
  static WeightSpec power(double p);
  /// A user weight. `derivative` may be empty (central differences are used).
  static WeightSpec custom(Fn value, Fn derivative, std::optional<Monotonicity> tag,
                           std::string name = "custom");

  Family family() const noexcept { return family_; }
  const std::string& name() const noexcept { return name_; }
  double parameter() const noexcept { return param_; }
  /// Declared tag; empty only for untagged custom weights.
  std::optional<Monotonicity> monotonicity() const noexcept { return tag_; }
  bool is_constant() const noexcept { return tag_ == Monotonicity::constant; }
  bool is_strictly_monotone() const noexcept {
    return tag_ == Monotonicity::increasing || tag_ == Monotonicity::decreasing;
  }

  double value(double q) const;
  double derivative(double q) const;

  /// g > 0 on [qmin, qmax] and the declared tag agrees with the sampled sign of g'.
  void validate_on(double qmin, double qmax) const;

 private:
  WeightSpec(Family f, double p, std::optional<Monotonicity> tag, std::string name)
      : family_(f), param_(p), tag_(tag), name_(std::move(name)) {}
  Family family_;
  double param_ = 0.0;
  std::optional<Monotonicity> tag_;
  std::string name_;
  Fn value_;
  Fn derivative_;
};

/// g(q), throwing invalid_weight when the value is not positive.
double weight_eval(const WeightSpec& w, double q);

}  // namespace hgas
