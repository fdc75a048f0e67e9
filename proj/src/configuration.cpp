#include "hgas/configuration.hpp"

#include <cmath>
#include <string>

#include "hgas/error.hpp"
#include "hgas/gas_spec.hpp"

namespace hgas {

Configuration::Configuration(int dim, std::size_t n) : dim_(dim), x_(dim * n, 0.0), q_(n, 1.0) {
  if (dim < 1) throw Error(Errc::invalid_dimension, "configuration dimension must be positive");
}

Configuration::Configuration(int dim, std::vector<double> coords, std::vector<double> charges)
    : dim_(dim), x_(std::move(coords)), q_(std::move(charges)) {
  if (dim < 1) throw Error(Errc::invalid_dimension, "configuration dimension must be positive");
  if (x_.size() != q_.size() * static_cast<std::size_t>(dim))
    throw Error(Errc::domain, "coordinate array does not match N x d");
}

void Configuration::get_point(std::size_t i, std::span<double> out) const {
  for (int k = 0; k < dim_; ++k) out[k] = coord(i, k);
}

void Configuration::set_point(std::size_t i, std::span<const double> p) {
  for (int k = 0; k < dim_; ++k) coord(i, k) = p[k];
}

double Configuration::radius(std::size_t i) const {
  double s = 0;
  for (int k = 0; k < dim_; ++k) s += coord(i, k) * coord(i, k);
  return std::sqrt(s);
}

void Configuration::validate(const GasSpec& spec) const {
  if (dim_ != spec.dimension()) throw Error(Errc::invalid_dimension, "configuration dimension differs from the gas");
  const auto& law = spec.charge_law();
  const double slack = 1e-12 * law.q_max();
  for (double q : q_)
    if (!(q >= law.q_min() - slack && q <= law.q_max() + slack))
      throw Error(Errc::domain, "charge " + std::to_string(q) + " outside the support of the charge law");
  for (double v : x_)
    if (!std::isfinite(v)) throw Error(Errc::domain, "non-finite coordinate");
  if (spec.manifold()) {
    std::vector<double> p(dim_);
    for (std::size_t i = 0; i < size(); ++i) {
      get_point(i, p);
      if (!(std::abs(spec.manifold()->value(p)) < 1e-10))
        throw Error(Errc::domain, "particle " + std::to_string(i) + " violates the manifold constraint");
    }
  }
}

}  // namespace hgas
