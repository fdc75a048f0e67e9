#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hgas {

enum class Errc {
  invalid_dimension,
  invalid_kernel,
  domain,
  invalid_weight,
  malformed_law,
  singular_configuration,
  tolerance,
  wrong_regime,
  internal_consistency,
  incompatible_target,
  integration_failure,
  integration_artifact,
  insufficient_statistics,
  undefined_metric,
  explicit_tag_required,
  unsupported,
  config,
  convergence,
  io,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Quadrature that ran out of refinement budget; carries the best estimate.
class ToleranceError : public Error {
 public:
  ToleranceError(const std::string& what, double estimate, double error_estimate)
      : Error(Errc::tolerance, what), estimate_(estimate), error_estimate_(error_estimate) {}
  double estimate() const noexcept { return estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double estimate_;
  double error_estimate_;
};

/// Too few samples for a statistic; reports how many were available.
class InsufficientStatistics : public Error {
 public:
  InsufficientStatistics(const std::string& what, std::size_t count)
      : Error(Errc::insufficient_statistics, what), count_(count) {}
  std::size_t count() const noexcept { return count_; }

 private:
  std::size_t count_;
};

}  // namespace hgas
