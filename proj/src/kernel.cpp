#include "hgas/kernel.hpp"

#include <cmath>
#include <string>

#include "hgas/error.hpp"
#include "hgas/geometry.hpp"

namespace hgas {

void KernelSpec::validate(int d) const {
  if (d < 2) throw Error(Errc::invalid_dimension, "dimension must be >= 2");
  if (!(eta_ > -(d + 2.0)))
    throw Error(Errc::invalid_kernel, "riesz eta must exceed -(d+2), got " + std::to_string(eta_));
}

double KernelSpec::value(int d, double r) const {
  const double c = geometric_constants(d).c;
  const double s = exponent(d);
  if (s == 0.0) return c * std::log(r);
  return -c * std::pow(r, -s) / s;
}

double KernelSpec::derivative(int d, double r) const {
  const double c = geometric_constants(d).c;
  return c * std::pow(r, -exponent(d) - 1.0);
}

double kernel_value(const KernelSpec& kernel, int d, double r) {
  kernel.validate(d);
  if (!(r > 0.0)) throw Error(Errc::domain, "kernel argument must be positive");
  return kernel.value(d, r);
}

}  // namespace hgas
