#pragma once

#include <functional>
#include <span>
#include <string>

namespace hgas {

/// External confining potential V.
class ConfinementSpec {
 public:
  enum class Family { quadratic, quartic_minus_quadratic, coordinate_square, custom };

  using ValueFn = std::function<double(std::span<const double>)>;
  using GradientFn = std::function<void(std::span<const double>, std::span<double>)>;

  /// V(x) = |x|^2
  static ConfinementSpec quadratic();
  /// V(x) = 1/2 sum_k x_k^4 - |x|^2
  static ConfinementSpec quartic_minus_quadratic();
  /// V(x) = x_axis^2 (meant for manifolds, where it is coercive on the surface).
  static ConfinementSpec coordinate_square(int axis);
  static ConfinementSpec custom(ValueFn value, GradientFn gradient, std::string name = "custom");

  Family family() const noexcept { return family_; }
  int axis() const noexcept { return axis_; }
  const std::string& name() const noexcept { return name_; }
  bool is_quadratic() const noexcept { return family_ == Family::quadratic; }

  double value(std::span<const double> x) const;
  void gradient(std::span<const double> x, std::span<double> out) const;

  /// Checks the axis against d. When `on_manifold` is false, also checks
  /// V -> +infinity by sampling growing spheres (custom and coordinate_square).
  void validate(int d, bool on_manifold) const;

 private:
  ConfinementSpec(Family f, int axis, std::string name) : family_(f), axis_(axis), name_(std::move(name)) {}
  Family family_;
  int axis_ = 0;
  std::string name_;
  ValueFn value_;
  GradientFn gradient_;
};

}  // namespace hgas
