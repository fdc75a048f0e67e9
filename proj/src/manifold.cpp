#include "hgas/manifold.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "hgas/error.hpp"

namespace hgas {

ManifoldSpec ManifoldSpec::unit_sphere() { return ManifoldSpec(Kind::unit_sphere, 3, "sphere"); }
ManifoldSpec ManifoldSpec::torus() { return ManifoldSpec(Kind::torus, 3, "torus"); }

ManifoldSpec ManifoldSpec::custom(ValueFn f, GradientFn grad, int ambient_dimension, std::string name) {
  if (!f || !grad) throw Error(Errc::domain, "custom manifold needs F and its gradient");
  if (ambient_dimension < 2) throw Error(Errc::invalid_dimension, "manifold ambient dimension must be >= 2");
  ManifoldSpec m(Kind::custom, ambient_dimension, std::move(name));
  m.f_ = std::move(f);
  m.grad_ = std::move(grad);
  return m;
}

double ManifoldSpec::value(std::span<const double> x) const {
  switch (kind_) {
    case Kind::unit_sphere:
      return x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - 1;
    case Kind::torus: {
      const double rho = std::hypot(x[0], x[1]);
      return (1 - rho) * (1 - rho) + x[2] * x[2] - 0.25;
    }
    case Kind::custom:
      return f_(x);
  }
  return 0;
}

void ManifoldSpec::gradient(std::span<const double> x, std::span<double> out) const {
  switch (kind_) {
    case Kind::unit_sphere:
      for (int k = 0; k < 3; ++k) out[k] = 2 * x[k];
      return;
    case Kind::torus: {
      const double rho = std::hypot(x[0], x[1]);
      const double f = rho > 0 ? -2 * (1 - rho) / rho : 0;
      out[0] = f * x[0];
      out[1] = f * x[1];
      out[2] = 2 * x[2];
      return;
    }
    case Kind::custom:
      grad_(x, out);
      return;
  }
}

void ManifoldSpec::project(std::span<double> x) const {
  // Closed-form closest points first; Newton steps then polish the residual.
  if (kind_ == Kind::unit_sphere) {
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    if (r > 0)
      for (int k = 0; k < 3; ++k) x[k] /= r;
    else
      x[2] = 1;
  } else if (kind_ == Kind::torus) {
    double rho = std::hypot(x[0], x[1]);
    double cx = 1, cy = 0;
    if (rho > 0) {
      cx = x[0] / rho;
      cy = x[1] / rho;
    }
    const double dr = rho - 1, dz = x[2];
    double len = std::hypot(dr, dz);
    double ur = 1, uz = 0;
    if (len > 0) {
      ur = dr / len;
      uz = dz / len;
    }
    rho = 1 + 0.5 * ur;
    x[0] = rho * cx;
    x[1] = rho * cy;
    x[2] = 0.5 * uz;
  }
  std::vector<double> g(x.size());
  for (int it = 0; it < max_newton_iterations; ++it) {
    const double f = value(x);
    if (std::abs(f) < tolerance) return;
    gradient(x, g);
    double g2 = 0;
    for (double v : g) g2 += v * v;
    if (!(g2 > 0)) break;
    for (std::size_t k = 0; k < x.size(); ++k) x[k] -= f * g[k] / g2;
  }
  if (!(std::abs(value(x)) < tolerance))
    throw Error(Errc::convergence, "manifold projection did not converge");
}

void ManifoldSpec::tangent_project(std::span<const double> x, std::span<double> v) const {
  std::vector<double> n(x.size());
  gradient(x, n);
  double n2 = 0, dot = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    n2 += n[k] * n[k];
    dot += n[k] * v[k];
  }
  if (!(n2 > 0)) throw Error(Errc::singular_configuration, "manifold gradient vanishes");
  for (std::size_t k = 0; k < x.size(); ++k) v[k] -= dot / n2 * n[k];
}

void ManifoldSpec::random_point(double u1, double u2, double u3, std::span<double> out) const {
  const double two_pi = 2 * std::numbers::pi;
  switch (kind_) {
    case Kind::unit_sphere: {
      const double z = 2 * u1 - 1, s = std::sqrt(std::max(0.0, 1 - z * z));
      out[0] = s * std::cos(two_pi * u2);
      out[1] = s * std::sin(two_pi * u2);
      out[2] = z;
      return;
    }
    case Kind::torus: {
      const double rho = 1 + 0.5 * std::cos(two_pi * u2);
      out[0] = rho * std::cos(two_pi * u1);
      out[1] = rho * std::sin(two_pi * u1);
      out[2] = 0.5 * std::sin(two_pi * u2);
      return;
    }
    case Kind::custom: {
      const double us[3] = {u1, u2, u3};
      for (std::size_t k = 0; k < out.size(); ++k) out[k] = 2 * us[k % 3] - 1 + 0.1 * k;
      project(out);
      return;
    }
  }
}

}  // namespace hgas
