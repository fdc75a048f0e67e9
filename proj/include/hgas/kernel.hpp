#pragma once

namespace hgas {

/// Pair interaction W(r). Coulomb is the eta = 0 member of the Riesz family.
///
/// With s = d - 2 + eta the kernel is W(r) = -c_d r^{-s} / s for s != 0 and
/// W(r) = c_d log r for s = 0, so W'(r) = c_d r^{1-d-eta} > 0 and the d >= 3
/// Coulomb case reduces to -1/r^{d-2}.
class KernelSpec {
 public:
  enum class Family { coulomb, riesz };

  static KernelSpec coulomb() { return KernelSpec(Family::coulomb, 0.0); }
  static KernelSpec riesz(double eta) { return KernelSpec(Family::riesz, eta); }

  Family family() const noexcept { return family_; }
  double eta() const noexcept { return eta_; }
  bool is_coulomb() const noexcept { return eta_ == 0.0; }

  /// s = d - 2 + eta
  double exponent(int d) const noexcept { return d - 2 + eta_; }
  bool is_logarithmic(int d) const noexcept { return exponent(d) == 0.0; }

  /// Throws invalid_kernel unless eta > -(d + 2).
  void validate(int d) const;

  double value(int d, double r) const;
  double derivative(int d, double r) const;

 private:
  KernelSpec(Family f, double eta) : family_(f), eta_(eta) {}
  Family family_;
  double eta_;
};

/// W(r) with argument checks (r > 0, admissible eta).
double kernel_value(const KernelSpec& kernel, int d, double r);

}  // namespace hgas
