#include "hgas/energy.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "hgas/error.hpp"
#include "hgas/quadrature.hpp"
#include "hgas/simd.hpp"

namespace hgas {
namespace {

simd::PairParams pair_params(const GasSpec& spec) {
  const int d = spec.dimension();
  const double eta = spec.kernel().eta();
  return {spec.geometry().c, 0.5 * (d + eta), d - 2 + eta};
}

double radial_v(const GasSpec& spec, double r) {
  double x[16] = {r};
  return spec.confinement().value(std::span<const double>(x, spec.dimension()));
}

// Confinement value and gradient for every particle, axis-major gradient.
void confinement_terms(const Configuration& cfg, const ConfinementSpec& v, std::vector<double>& val,
                       std::vector<double>& grad) {
  const std::size_t n = cfg.size();
  const int d = cfg.dim();
  const double* x = cfg.coords().data();
  val.assign(n, 0.0);
  grad.assign(d * n, 0.0);
  switch (v.family()) {
    case ConfinementSpec::Family::quadratic:
      for (int k = 0; k < d; ++k)
        for (std::size_t i = 0; i < n; ++i) {
          const double xi = x[k * n + i];
          val[i] += xi * xi;
          grad[k * n + i] = 2 * xi;
        }
      return;
    case ConfinementSpec::Family::quartic_minus_quadratic:
      for (int k = 0; k < d; ++k)
        for (std::size_t i = 0; i < n; ++i) {
          const double xi = x[k * n + i];
          val[i] += 0.5 * xi * xi * xi * xi - xi * xi;
          grad[k * n + i] = 2 * xi * xi * xi - 2 * xi;
        }
      return;
    case ConfinementSpec::Family::coordinate_square: {
      const int a = v.axis();
      for (std::size_t i = 0; i < n; ++i) {
        const double xi = x[a * n + i];
        val[i] = xi * xi;
        grad[a * n + i] = 2 * xi;
      }
      return;
    }
    case ConfinementSpec::Family::custom: {
      std::vector<double> p(d), g(d);
      for (std::size_t i = 0; i < n; ++i) {
        cfg.get_point(i, p);
        val[i] = v.value(p);
        v.gradient(p, g);
        for (int k = 0; k < d; ++k) grad[k * n + i] = g[k];
      }
      return;
    }
  }
}

// Angular average of W(|x - y|) over |x| = r, |y| = s.
double angular_average(const GasSpec& spec, double r, double s) {
  const int d = spec.dimension();
  const auto& ker = spec.kernel();
  if (r == 0 || s == 0) return ker.value(d, std::max(r, s));
  const double sk = ker.exponent(d), c = spec.geometry().c;
  if (d == 3) {
    const double up = (r + s) * (r + s), um = (r - s) * (r - s), den = 2 * r * s;
    if (sk == 0) {
      auto F = [](double u) { return u > 0 ? u * std::log(u) - u : 0.0; };
      return 0.5 * 0.5 * c * (F(up) - F(um)) / den;
    }
    const double sigma = 0.5 * sk;
    double integral;
    if (sigma == 1)
      integral = (std::log(up) - std::log(um)) / den;
    else
      integral = (std::pow(up, 1 - sigma) - std::pow(um, 1 - sigma)) / (den * (1 - sigma));
    return 0.5 * (-c / sk) * integral;
  }
  if (d == 2) {
    boost::math::quadrature::tanh_sinh<double> ts;
    auto f = [&](double t) {
      const double h = std::sin(0.5 * t);
      const double u = (r - s) * (r - s) + 4 * r * s * h * h;
      return u > 0 ? ker.value(d, std::sqrt(u)) : 0.0;
    };
    return ts.integrate(f, 0.0, std::numbers::pi, 1e-10) / std::numbers::pi;
  }
  throw Error(Errc::unsupported, "non-Coulomb mean-field potential is available for d = 2 and 3 only");
}

double charge_mass_density(const EquilibriumProfile& p, const GasSpec& spec, double s) {
  if (s <= 0) return 0;
  return spec.geometry().sphere_area * std::pow(s, p.dimension - 1) * p.rho_q(s);
}

}  // namespace

EnergyForces evaluate(const Configuration& config, const GasSpec& spec, bool want_energy, bool check_guard) {
  const std::size_t n = config.size();
  const int d = config.dim();
  if (d != spec.dimension()) throw Error(Errc::invalid_dimension, "configuration dimension differs from the gas");
  EnergyForces out;
  std::vector<double> field(d * n);
  out.min_r2.assign(n, INFINITY);
  simd::PairArgs args;
  args.dim = d;
  args.n = n;
  args.x = config.coords().data();
  args.q = config.charges().data();
  args.params = pair_params(spec);
  args.field = field.data();
  args.min_r2 = out.min_r2.data();
  args.want_energy = want_energy;
  if (n >= 2) out.pair_sum = pair_interactions(args);
  for (std::size_t i = 0; check_guard && i < n; ++i)
    if (!(out.min_r2[i] >= coincidence_guard * coincidence_guard))
      throw Error(Errc::singular_configuration,
                  "particles closer than " + std::to_string(coincidence_guard) + " (index " + std::to_string(i) + ")");

  std::vector<double> v, gv;
  confinement_terms(config, spec.confinement(), v, gv);
  const auto q = config.charges();
  const double N = static_cast<double>(n);
  out.forces.assign(d * n, 0.0);
  double conf = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = spec.weight().value(q[i]);
    conf += q[i] * g * v[i];
    for (int k = 0; k < d; ++k)
      out.forces[k * n + i] = -N * q[i] * g * gv[k * n + i] + 2 * q[i] * field[k * n + i];
  }
  out.energy = want_energy ? N * conf - 2 * out.pair_sum : 0.0;
  return out;
}

double total_energy(const Configuration& config, const GasSpec& spec) { return evaluate(config, spec).energy; }

std::vector<double> forces(const Configuration& config, const GasSpec& spec) {
  return evaluate(config, spec, false).forces;
}

double mean_field_potential(const EquilibriumProfile& p, const GasSpec& spec, double r) {
  const int d = spec.dimension();
  const auto& ker = spec.kernel();
  const double R = p.support_radius;
  if (r < 0) throw Error(Errc::domain, "radius must be non-negative");
  if (ker.is_coulomb()) {
    if (r >= R) return p.mean_charge * ker.value(d, r);
    // Shell theorem: the charge inside r acts as a point charge, the rest
    // contributes its own potential, which is constant inside each shell.
    const double inner = r > 0 ? ker.value(d, r) * p.enclosed_charge(r) : 0.0;
    auto integrand = [&](double s) { return s > 0 ? ker.value(d, s) * charge_mass_density(p, spec, s) : 0.0; };
    return inner + integrate_split(integrand, r, R, p.breakpoints, 1e-10);
  }
  boost::math::quadrature::tanh_sinh<double> ts;
  auto integrand = [&](double s) { return charge_mass_density(p, spec, s) * angular_average(spec, r, s); };
  std::vector<double> pts{0.0};
  for (double b : p.breakpoints)
    if (b > 0 && b < R) pts.push_back(b);
  if (r > 0 && r < R) pts.push_back(r);
  pts.push_back(R);
  std::sort(pts.begin(), pts.end());
  double total = 0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k)
    if (pts[k + 1] > pts[k]) total += ts.integrate(integrand, pts[k], pts[k + 1], 1e-9);
  return total;
}

double interaction_integral(const EquilibriumProfile& p, const GasSpec& spec) {
  const int d = spec.dimension();
  const auto& ker = spec.kernel();
  const double R = p.support_radius;
  if (ker.is_coulomb()) {
    auto f = [&](double r) {
      if (r <= 0) return 0.0;
      return 2 * ker.value(d, r) * p.enclosed_charge(r) * charge_mass_density(p, spec, r);
    };
    return integrate_split(f, 0, R, p.breakpoints, 1e-9);
  }
  boost::math::quadrature::tanh_sinh<double> ts;
  auto f = [&](double r) { return charge_mass_density(p, spec, r) * mean_field_potential(p, spec, r); };
  return ts.integrate(f, 0.0, R, 1e-8);
}

double confinement_integral(const EquilibriumProfile& p, const GasSpec& spec) {
  const double S = spec.geometry().sphere_area;
  const int d = p.dimension;
  auto f = [&](double r) { return r <= 0 ? 0.0 : S * std::pow(r, d - 1) * p.rho_qg(r) * radial_v(spec, r); };
  return integrate_split(f, 0, p.support_radius, p.breakpoints, 1e-9);
}

double intensive_energy(const EquilibriumProfile& p, const GasSpec& spec) {
  return confinement_integral(p, spec) - interaction_integral(p, spec);
}

double equilibrium_constant(const EquilibriumProfile& p, const GasSpec& spec, double q) {
  const double r = p.radius_of(q);
  return spec.weight().value(q) * radial_v(spec, r) - 2 * mean_field_potential(p, spec, r);
}

double zeta(const EquilibriumProfile& p, const GasSpec& spec, double q, std::span<const double> x) {
  const auto& law = spec.charge_law();
  if (q < law.q_min() * (1 - 1e-12) || q > law.q_max() * (1 + 1e-12))
    throw Error(Errc::domain, "charge outside the support of the law");
  double r2 = 0;
  for (double v : x) r2 += v * v;
  const double g = spec.weight().value(q);
  return 0.5 * q * g * spec.confinement().value(x) - q * mean_field_potential(p, spec, std::sqrt(r2)) -
         0.5 * q * equilibrium_constant(p, spec, q);
}

SplitBreakdown splitting_terms(const Configuration& config, const EquilibriumProfile& p, const GasSpec& spec) {
  const std::size_t n = config.size();
  const int d = config.dim();
  const double N = static_cast<double>(n);
  const auto ef = evaluate(config, spec);
  SplitBreakdown out;
  out.n = n;
  out.total_check = ef.energy;
  const double conf_int = confinement_integral(p, spec);
  out.interaction = interaction_integral(p, spec);
  out.h = conf_int - out.interaction;
  out.leading = N * N * out.h;

  std::map<double, double> constants;
  double sum_zeta = 0, sum_qphi = 0, sum_qc = 0;
  std::vector<double> x(d);
  const auto q = config.charges();
  for (std::size_t i = 0; i < n; ++i) {
    config.get_point(i, x);
    auto it = constants.find(q[i]);
    if (it == constants.end()) it = constants.emplace(q[i], equilibrium_constant(p, spec, q[i])).first;
    const double C = it->second;
    const double phi = mean_field_potential(p, spec, config.radius(i));
    const double g = spec.weight().value(q[i]);
    sum_zeta += 0.5 * q[i] * g * spec.confinement().value(x) - q[i] * phi - 0.5 * q[i] * C;
    sum_qphi += q[i] * phi;
    sum_qc += q[i] * C;
  }
  out.marginal_correction = N * sum_qc - N * N * (conf_int - 2 * out.interaction);
  out.zeta_term = 2 * N * sum_zeta + out.marginal_correction;
  out.quadratic_remainder = -(2 * ef.pair_sum - 2 * N * sum_qphi + N * N * out.interaction);
  const double sum = out.leading + out.zeta_term + out.quadratic_remainder;
  out.identity_residual = std::abs(sum - out.total_check) / std::max(1.0, std::abs(out.total_check));
  if (d == 2 && n >= 2) out.nlogn_coefficient = (out.leading - out.total_check) / (N * std::log(N));
  return out;
}

}  // namespace hgas
