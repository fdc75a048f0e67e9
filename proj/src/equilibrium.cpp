#include "hgas/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hgas/error.hpp"
#include "hgas/quadrature.hpp"

namespace hgas {
namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

void require_coulomb_quadratic(const GasSpec& spec, const char* what) {
  if (!spec.kernel().is_coulomb())
    throw Error(Errc::wrong_regime, std::string(what) + " needs the Coulomb kernel");
  if (!spec.confinement().is_quadratic())
    throw Error(Errc::wrong_regime, std::string(what) + " needs V(x) = |x|^2");
  if (spec.manifold()) throw Error(Errc::wrong_regime, std::string(what) + " has no manifold form");
}

double root_d(double v, int d) { return v <= 0 ? 0.0 : std::pow(v, 1.0 / d); }

EquilibriumProfile::Order order_of(const WeightSpec& w) {
  if (w.monotonicity() == Monotonicity::increasing) return EquilibriumProfile::Order::ordered_increasing;
  if (w.monotonicity() == Monotonicity::decreasing) return EquilibriumProfile::Order::ordered_decreasing;
  return EquilibriumProfile::Order::uniform_disordered;
}

}  // namespace

std::string to_string(EquilibriumProfile::Order o) {
  switch (o) {
    case EquilibriumProfile::Order::uniform_disordered: return "uniform_disordered";
    case EquilibriumProfile::Order::ordered_increasing: return "ordered_increasing";
    case EquilibriumProfile::Order::ordered_decreasing: return "ordered_decreasing";
  }
  return "unknown";
}

EquilibriumProfile::Table EquilibriumProfile::tabulate(std::size_t points) const {
  Table t;
  if (points < 2) points = 2;
  for (std::size_t k = 0; k < points; ++k) {
    const double r = support_radius * std::pow(static_cast<double>(k) / (points - 1), 1.0 / dimension);
    t.r.push_back(r);
    t.rho.push_back(rho(r));
    t.rho_q.push_back(rho_q(r));
    t.q.push_back(charge_at(r));
  }
  return t;
}

EquilibriumProfile constant_g_profile(const GasSpec& spec) {
  if (!spec.weight().is_constant()) throw Error(Errc::wrong_regime, "constant_g_profile needs a constant weight");
  require_coulomb_quadratic(spec, "constant_g_profile");
  const auto& geo = spec.geometry();
  const int d = spec.dimension();
  const double g = spec.weight().value(spec.charge_law().q_min());
  const double Q = spec.charge_law().mean();
  const double R = root_d(geo.c * Q / g, d);
  const double rq = d * g / geo.k;

  EquilibriumProfile p;
  p.dimension = d;
  p.order = EquilibriumProfile::Order::uniform_disordered;
  p.support_radius = R;
  p.mean_charge = Q;
  p.breakpoints = {R};
  p.rho_q = [=](double r) { return r <= R ? rq : 0.0; };
  p.rho = [=](double r) { return r <= R ? rq / Q : 0.0; };
  p.rho_qg = [=](double r) { return r <= R ? rq * g : 0.0; };
  p.charge_at = [](double) { return nan; };
  p.radius_of = [](double) { return 0.0; };
  p.enclosed_charge = [=](double r) { return r >= R ? Q : Q * std::pow(r / R, d); };
  p.enclosed_mass = [=](double r) { return r >= R ? 1.0 : std::pow(r / R, d); };
  p.sample_radius = [=](double, double u) { return R * std::pow(u, 1.0 / d); };
  return p;
}

ShellLayout shell_layout(const GasSpec& spec) {
  const auto& law = spec.charge_law();
  const auto& w = spec.weight();
  if (!law.is_atomic()) throw Error(Errc::wrong_regime, "shell_layout needs an atomic charge law");
  if (!w.is_strictly_monotone()) throw Error(Errc::wrong_regime, "shell_layout needs a strictly monotone weight");
  require_coulomb_quadratic(spec, "shell_layout");
  const auto& geo = spec.geometry();
  const int d = spec.dimension();
  const auto& atoms = law.atoms();
  const bool increasing = w.monotonicity() == Monotonicity::increasing;

  ShellLayout out;
  out.dimension = d;
  const std::size_t m = atoms.size();
  for (std::size_t i = 0; i < m; ++i) {
    double inside = 0;
    for (std::size_t j = 0; j < m; ++j)
      if (increasing ? j > i : j < i) inside += atoms[j].charge * atoms[j].weight;
    const double g = weight_eval(w, atoms[i].charge);
    const double lo = geo.c * inside / g;
    const double hi = lo + geo.c * atoms[i].charge * atoms[i].weight / g;
    out.shells.push_back({atoms[i].charge, atoms[i].weight, root_d(lo, d), root_d(hi, d),
                          d * g / (geo.k * atoms[i].charge)});
  }
  std::sort(out.shells.begin(), out.shells.end(),
            [](const auto& a, const auto& b) { return a.inner_radius < b.inner_radius; });
  for (std::size_t i = 1; i < m; ++i) {
    const double gap = out.shells[i].inner_radius - out.shells[i - 1].outer_radius;
    if (gap < -1e-12 * out.shells[i].outer_radius)
      throw Error(Errc::internal_consistency, "shell layout has overlapping shells");
  }
  return out;
}

EquilibriumProfile profile_from_shells(const GasSpec& spec, const ShellLayout& layout) {
  const int d = layout.dimension;
  const auto& w = spec.weight();
  auto shells = layout.shells;
  EquilibriumProfile p;
  p.dimension = d;
  p.order = order_of(w);
  p.shells = layout;
  p.mean_charge = 0;
  for (const auto& s : shells) {
    p.mean_charge += s.charge * s.fraction;
    p.breakpoints.push_back(s.inner_radius);
    p.breakpoints.push_back(s.outer_radius);
    p.support_radius = std::max(p.support_radius, s.outer_radius);
  }
  auto find = [shells](double r) -> const ShellLayout::Shell* {
    for (const auto& s : shells)
      if (r >= s.inner_radius && r <= s.outer_radius) return &s;
    return nullptr;
  };
  std::vector<double> gs;
  for (const auto& s : shells) gs.push_back(w.value(s.charge));
  p.rho = [find](double r) {
    auto s = find(r);
    return s ? s->density : 0.0;
  };
  p.rho_q = [find](double r) {
    auto s = find(r);
    return s ? s->density * s->charge : 0.0;
  };
  p.rho_qg = [find, w](double r) {
    auto s = find(r);
    return s ? s->density * s->charge * w.value(s->charge) : 0.0;
  };
  p.charge_at = [find](double r) {
    auto s = find(r);
    return s ? s->charge : nan;
  };
  auto shell_of_charge = [shells](double q) -> const ShellLayout::Shell& {
    for (const auto& s : shells)
      if (std::abs(s.charge - q) <= 1e-12 * std::max(1.0, q)) return s;
    throw Error(Errc::domain, "charge " + std::to_string(q) + " is not an atom of the law");
  };
  p.radius_of = [shell_of_charge](double q) { return shell_of_charge(q).inner_radius; };
  auto filled = [d](const ShellLayout::Shell& s, double r) {
    const double lo = std::pow(s.inner_radius, d), hi = std::pow(s.outer_radius, d);
    if (hi <= lo) return r >= s.outer_radius ? 1.0 : 0.0;
    return std::clamp((std::pow(r, d) - lo) / (hi - lo), 0.0, 1.0);
  };
  p.enclosed_charge = [shells, filled](double r) {
    double m = 0;
    for (const auto& s : shells) m += s.charge * s.fraction * filled(s, r);
    return m;
  };
  p.enclosed_mass = [shells, filled](double r) {
    double m = 0;
    for (const auto& s : shells) m += s.fraction * filled(s, r);
    return m;
  };
  p.sample_radius = [shell_of_charge, d](double q, double u) {
    const auto& s = shell_of_charge(q);
    const double lo = std::pow(s.inner_radius, d), hi = std::pow(s.outer_radius, d);
    return std::pow(lo + u * (hi - lo), 1.0 / d);
  };
  return p;
}

EquilibriumProfile continuous_profile(const GasSpec& spec) {
  const auto& law = spec.charge_law();
  const auto& w = spec.weight();
  if (law.is_atomic()) throw Error(Errc::wrong_regime, "continuous_profile needs a continuous charge law");
  if (!w.is_strictly_monotone())
    throw Error(Errc::wrong_regime, "continuous_profile needs a strictly monotone weight");
  require_coulomb_quadratic(spec, "continuous_profile");
  if (law.has_interior_gap())
    throw Error(Errc::unsupported, "charge laws with disconnected support are not supported");
  const auto& geo = spec.geometry();
  const int d = spec.dimension();
  const bool increasing = w.monotonicity() == Monotonicity::increasing;
  const double qmin = law.q_min(), qmax = law.q_max();
  const double c = geo.c, k = geo.k;

  // Charge carried by particles closer to the origin than those of charge q.
  auto inner_moment = [=](double q) {
    return increasing ? law.partial_first_moment(q, qmax) : law.partial_first_moment(qmin, q);
  };
  auto xi_of_q = [=](double q) { return c * inner_moment(q) / w.value(q); };
  const double R = root_d(xi_of_q(increasing ? qmin : qmax), d);
  auto q_of_r = [=](double r) {
    if (r < 0 || r > R) return nan;
    const double target = std::pow(r, d);
    if (target <= 0) return increasing ? qmax : qmin;
    // R^d can round just past xi at the outer charge.
    const double q_edge = increasing ? qmin : qmax;
    if (target >= xi_of_q(q_edge)) return q_edge;
    return bisect([&](double q) { return xi_of_q(q) - target; }, qmin, qmax, 1e-12 * qmax);
  };
  auto rho_at = [=](double r) {
    const double q = q_of_r(r);
    if (std::isnan(q)) return 0.0;
    const double g = w.value(q), nu = law.density(q), M = inner_moment(q);
    const double den = q * nu * g + M * std::abs(w.derivative(q));
    if (den <= 0) return d * g / (k * q);
    return d * nu * g * g / (k * den);
  };

  EquilibriumProfile p;
  p.dimension = d;
  p.order = order_of(w);
  p.support_radius = R;
  p.mean_charge = law.mean();
  p.breakpoints = {R};
  p.rho = rho_at;
  p.rho_q = [=](double r) {
    const double q = q_of_r(r);
    return std::isnan(q) ? 0.0 : q * rho_at(r);
  };
  p.rho_qg = [=](double r) {
    const double q = q_of_r(r);
    return std::isnan(q) ? 0.0 : q * w.value(q) * rho_at(r);
  };
  p.charge_at = q_of_r;
  p.radius_of = [=](double q) {
    if (q < qmin * (1 - 1e-12) || q > qmax * (1 + 1e-12))
      throw Error(Errc::domain, "charge outside the support of the law");
    return root_d(xi_of_q(std::clamp(q, qmin, qmax)), d);
  };
  const double Q = law.mean();
  p.enclosed_charge = [=](double r) {
    if (r >= R) return Q;
    const double q = q_of_r(r);
    return w.value(q) * std::pow(r, d) / c;
  };
  p.enclosed_mass = [=](double r) {
    if (r >= R) return 1.0;
    const double q = q_of_r(r);
    return increasing ? law.partial_mass(q, qmax) : law.partial_mass(qmin, q);
  };
  p.sample_radius = [=](double q, double) { return root_d(xi_of_q(std::clamp(q, qmin, qmax)), d); };

  const double S = geo.sphere_area;
  double mass = 0;
  try {
    mass = integrate_split([&](double r) { return S * std::pow(r, d - 1) * rho_at(r); }, 0, R, {}, 1e-9);
  } catch (const ToleranceError& e) {
    mass = e.estimate();
  }
  if (std::abs(mass - 1) > 1e-6)
    throw Error(Errc::internal_consistency, "continuous profile integrates to " + std::to_string(mass));
  return p;
}

PartialPrediction partial_prediction(const GasSpec& spec, std::size_t levels) {
  const auto& law = spec.charge_law();
  const auto& w = spec.weight();
  const double qmin = law.q_min(), qmax = law.q_max();
  constexpr int grid = 4096;
  std::vector<double> qs(grid + 1), gs(grid + 1);
  double gmin = INFINITY, gmax = -INFINITY;
  for (int k = 0; k <= grid; ++k) {
    qs[k] = qmin + (qmax - qmin) * k / grid;
    gs[k] = w.value(qs[k]);
    gmin = std::min(gmin, gs[k]);
    gmax = std::max(gmax, gs[k]);
  }
  PartialPrediction out;
  if (levels < 2) levels = 2;
  for (std::size_t l = 0; l < levels; ++l) {
    // Interior levels only; the extremes are tangencies.
    const double gamma = gmin + (gmax - gmin) * (l + 0.5) / levels;
    PartialPrediction::LevelSet set{gamma, {}};
    for (int k = 0; k < grid; ++k) {
      const double a = gs[k] - gamma, b = gs[k + 1] - gamma;
      if (a == 0) set.charges.push_back(qs[k]);
      else if ((a > 0) != (b > 0) && b != 0)
        set.charges.push_back(bisect([&](double q) { return w.value(q) - gamma; }, qs[k], qs[k + 1]));
    }
    if (gs[grid] == gamma) set.charges.push_back(qs[grid]);
    if (set.charges.size() > 1) out.multi_valued = true;
    out.level_sets.push_back(std::move(set));
  }
  return out;
}

Prediction predict(const GasSpec& spec) {
  const auto tag = spec.weight().monotonicity();
  if (!tag) throw Error(Errc::explicit_tag_required, "custom weight needs a monotonicity tag for predictions");
  Prediction out;
  switch (*tag) {
    case Monotonicity::constant:
      out.kind = Prediction::Kind::profile;
      out.profile = constant_g_profile(spec);
      break;
    case Monotonicity::non_monotonic:
      out.kind = Prediction::Kind::partial;
      out.partial = partial_prediction(spec);
      break;
    case Monotonicity::increasing:
    case Monotonicity::decreasing:
      if (spec.charge_law().is_atomic()) {
        out.kind = Prediction::Kind::shells;
        out.shells = shell_layout(spec);
        out.profile = profile_from_shells(spec, *out.shells);
      } else {
        out.kind = Prediction::Kind::profile;
        out.profile = continuous_profile(spec);
      }
      break;
  }
  return out;
}

EquilibriumProfile predicted_profile(const GasSpec& spec) {
  auto p = predict(spec);
  if (!p.profile) throw Error(Errc::wrong_regime, "no radial profile for a non-monotone weight");
  return *p.profile;
}

}  // namespace hgas
