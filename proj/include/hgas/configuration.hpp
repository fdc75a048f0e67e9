#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hgas {

class GasSpec;

/// N charged particles in R^d, coordinates stored axis-major (x[k * n + i]).
class Configuration {
 public:
  Configuration() = default;
  Configuration(int dim, std::size_t n);
  Configuration(int dim, std::vector<double> coords, std::vector<double> charges);

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return q_.size(); }

  double coord(std::size_t i, int k) const { return x_[k * size() + i]; }
  double& coord(std::size_t i, int k) { return x_[k * size() + i]; }
  std::span<const double> axis(int k) const { return {x_.data() + k * size(), size()}; }
  std::span<double> axis(int k) { return {x_.data() + k * size(), size()}; }
  std::span<const double> coords() const noexcept { return x_; }
  std::span<double> coords() noexcept { return x_; }
  std::span<const double> charges() const noexcept { return q_; }
  std::span<double> charges() noexcept { return q_; }

  void get_point(std::size_t i, std::span<double> out) const;
  void set_point(std::size_t i, std::span<const double> p);
  double radius(std::size_t i) const;

  const std::string& manifold_tag() const noexcept { return manifold_; }
  void set_manifold_tag(std::string tag) { manifold_ = std::move(tag); }

  /// Charges inside the support of nu, dimension match, and the manifold
  /// constraint within 1e-10 when the gas is constrained.
  void validate(const GasSpec& spec) const;

 private:
  int dim_ = 0;
  std::vector<double> x_;
  std::vector<double> q_;
  std::string manifold_;
};

}  // namespace hgas
