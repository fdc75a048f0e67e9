#pragma once

#include <functional>
#include <span>
#include <string>

namespace hgas {

/// A hypersurface {F = 0} in R^d that particles are constrained to.
class ManifoldSpec {
 public:
  enum class Kind { unit_sphere, torus, custom };

  using ValueFn = std::function<double(std::span<const double>)>;
  using GradientFn = std::function<void(std::span<const double>, std::span<double>)>;

  /// |x|^2 - 1 in R^3
  static ManifoldSpec unit_sphere();
  /// (1 - sqrt(x^2 + y^2))^2 + z^2 - 1/4 in R^3
  static ManifoldSpec torus();
  static ManifoldSpec custom(ValueFn f, GradientFn grad, int ambient_dimension, std::string name = "custom");

  Kind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  int ambient_dimension() const noexcept { return dim_; }

  double value(std::span<const double> x) const;
  void gradient(std::span<const double> x, std::span<double> out) const;

  /// Moves x onto the surface (Newton steps along grad F). Throws
  /// convergence if |F| stays above the tolerance.
  void project(std::span<double> x) const;
  /// Removes the normal component of v at x.
  void tangent_project(std::span<const double> x, std::span<double> v) const;
  /// A point on the surface used to seed configurations.
  void random_point(double u1, double u2, double u3, std::span<double> out) const;

  static constexpr int max_newton_iterations = 20;
  static constexpr double tolerance = 1e-12;

 private:
  ManifoldSpec(Kind k, int dim, std::string name) : kind_(k), dim_(dim), name_(std::move(name)) {}
  Kind kind_;
  int dim_;
  std::string name_;
  ValueFn f_;
  GradientFn grad_;
};

}  // namespace hgas
