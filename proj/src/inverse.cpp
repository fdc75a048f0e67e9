#include "hgas/inverse.hpp"

#include <algorithm>
#include <array>
#include <boost/math/special_functions/fpclassify.hpp>
#include <boost/math/interpolators/pchip.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "hgas/equilibrium.hpp"
#include "hgas/error.hpp"
#include "hgas/quadrature.hpp"
#include "hgas/stats.hpp"

namespace hgas {
namespace {

template <class... A>
std::string fmt(const char* f, A... a) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

using State = std::array<double, 3>;  // q, r, enclosed particle mass

struct Field {
  const TargetDensity& f;
  const WeightSpec& g;
  int d;
  double sigma;  // +1 for g decreasing, -1 for g increasing (time reversed)
  double kd_over_d, sphere;

  double a(double q) const { return kd_over_d * q / g.value(q); }
  double b(double q) const { return g.derivative(q) / g.value(q); }

  State operator()(const State& y) const {
    const double q = y[0], r = y[1];
    const double fr = f.f(std::min(r, f.support_radius));
    const double dq = sigma * (1 - a(q) * fr);
    const double dr = sigma * (-b(q) * r / d);
    return {dq, dr, sphere * fr * std::pow(r, d - 1) * dr};
  }
};

State rk4(const Field& F, const State& y, double h) {
  auto add = [](const State& a, const State& b, double s) {
    return State{a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]};
  };
  const State k1 = F(y);
  const State k2 = F(add(y, k1, 0.5 * h));
  const State k3 = F(add(y, k2, 0.5 * h));
  const State k4 = F(add(y, k3, h));
  State out;
  for (int i = 0; i < 3; ++i) out[i] = y[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  return out;
}

}  // namespace

TargetDensity TargetDensity::fig7() {
  TargetDensity t;
  t.name = "fig7";
  t.support_radius = 1;
  t.f = [](double r) { return r <= 1 ? 3 / (4 * std::numbers::pi) * (2 - r) : 0.0; };
  t.df = [](double r) { return r <= 1 ? -3 / (4 * std::numbers::pi) : 0.0; };
  return t;
}

TargetDensity TargetDensity::parabolic() {
  TargetDensity t;
  t.name = "parabolic";
  t.support_radius = 1;
  t.f = [](double r) { return r <= 1 ? 2 / std::numbers::pi * (1 - r * r) : 0.0; };
  t.df = [](double r) { return r <= 1 ? -4 / std::numbers::pi * r : 0.0; };
  return t;
}

TargetDensity TargetDensity::tabulated(std::vector<double> r, std::vector<double> f, std::string name) {
  if (r.size() != f.size() || r.size() < 4)
    throw Error(Errc::incompatible_target, "tabulated target needs at least four (r, f) samples");
  if (r.front() != 0) throw Error(Errc::incompatible_target, "tabulated target must start at r = 0");
  for (std::size_t k = 1; k < r.size(); ++k)
    if (!(r[k] > r[k - 1])) throw Error(Errc::incompatible_target, "target radii must increase strictly");
  TargetDensity t;
  t.name = std::move(name);
  t.support_radius = r.back();
  auto spline = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(std::move(r), std::move(f));
  const double R = t.support_radius;
  t.f = [spline, R](double x) { return x <= R ? (*spline)(std::max(x, 0.0)) : 0.0; };
  t.df = [spline, R](double x) { return x <= R ? spline->prime(std::max(x, 0.0)) : 0.0; };
  t.validate();
  return t;
}

TargetDensity TargetDensity::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open target file " + path);
  std::vector<double> r, f;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double a, b;
    if (!(ss >> a >> b)) {
      if (r.empty()) continue;  // header
      throw Error(Errc::io, "malformed target row: " + line);
    }
    r.push_back(a);
    f.push_back(b);
  }
  return tabulated(std::move(r), std::move(f), path);
}

void TargetDensity::validate() const {
  if (!f || !df) throw Error(Errc::incompatible_target, "target needs f and f'");
  if (!(support_radius > 0)) throw Error(Errc::incompatible_target, "target support radius must be positive");
  const double f0 = f(0);
  if (!(f0 > 0) || !std::isfinite(f0)) throw Error(Errc::incompatible_target, "f(0) must be finite and positive");
  constexpr int samples = 1000;
  double prev = f0;
  for (int k = 1; k <= samples; ++k) {
    const double v = f(support_radius * k / samples);
    if (!(v >= 0)) throw Error(Errc::incompatible_target, "target density is negative");
    if (!(v < prev)) throw Error(Errc::incompatible_target, "target density is not strictly decreasing");
    prev = v;
  }
}

double saddle_charge(const TargetDensity& f, const WeightSpec& g, int d) {
  f.validate();
  if (!g.is_strictly_monotone()) throw Error(Errc::incompatible_target, "inverse design needs a strictly monotone g");
  const auto geo = geometric_constants(d);
  const double f0 = f.f(0);
  auto h = [&](double q) { return geo.k / d * q / g.value(q) * f0 - 1; };
  // Log-spaced scan for the first sign change.
  double prev_q = 1e-8, prev = h(prev_q);
  for (int k = 1; k <= 320; ++k) {
    const double q = std::pow(10.0, -8 + 16.0 * k / 320);
    const double v = h(q);
    if (v == 0) return q;
    if ((v > 0) != (prev > 0)) return bisect(h, prev_q, q, 1e-15 * q);
    prev_q = q;
    prev = v;
  }
  throw Error(Errc::incompatible_target, "no charge satisfies a(q) f(0) = 1");
}

ManifoldCurve integrate_unstable_manifold(const TargetDensity& f, const WeightSpec& g, int d,
                                          const StepControl& ctl) {
  const double q0 = saddle_charge(f, g, d);
  const auto geo = geometric_constants(d);
  const bool increasing = g.monotonicity() == Monotonicity::increasing;
  Field F{f, g, d, increasing ? -1.0 : 1.0, geo.k / d, geo.sphere_area};
  const double R = f.support_radius;

  ManifoldCurve c;
  c.dimension = d;
  c.g_increasing = increasing;
  c.saddle_q = q0;
  // Jacobian at (q0, 0) in (q, r): [[-a' f0, -a f'(0)], [0, -b / d]], times sigma.
  const double h = 1e-6 * q0;
  const double da = (F.a(q0 + h) - F.a(q0 - h)) / (2 * h);
  const double f0 = f.f(0), df0 = f.df(0);
  const double lq = F.sigma * (-da * f0), lr = F.sigma * (-F.b(q0) / d);
  if (!(lr > 0 && lq < 0)) {
    throw Error(Errc::incompatible_target,
                "the fixed point is not a saddle (eigenvalues " + std::to_string(lq) + ", " + std::to_string(lr) +
                    "); the reconstruction would not be unique");
  }
  c.unstable_eigenvalue = lr;
  c.stable_eigenvalue = lq;
  c.eigenvector_r = 1;
  c.eigenvector_q = F.sigma * (-F.a(q0) * df0) / (lr - lq);
  c.epsilon = ctl.epsilon_scale * R;

  State y{q0 + c.epsilon * c.eigenvector_q, c.epsilon, geo.ball_volume * f0 * std::pow(c.epsilon, d)};
  const double max_dr = ctl.max_dr_fraction * R, max_dq = ctl.max_dq_fraction * q0;
  auto push = [&](const State& s) {
    c.q.push_back(s[0]);
    c.r.push_back(s[1]);
    c.mass.push_back(s[2]);
  };
  push(y);
  double step = 0.1 / lr;
  bool done = false;
  for (int it = 0; it < ctl.max_steps && !done; ++it) {
    const State full = rk4(F, y, step);
    const State half = rk4(F, rk4(F, y, 0.5 * step), 0.5 * step);
    double err = 0;
    for (int i = 0; i < 3; ++i)
      err = std::max(err, std::abs(half[i] - full[i]) / (ctl.abs_tol + ctl.rel_tol * std::abs(half[i])));
    const bool too_far = std::abs(half[1] - y[1]) > max_dr || std::abs(half[0] - y[0]) > max_dq;
    if (err > 1 || too_far || !std::isfinite(err)) {
      step *= too_far && err <= 1 ? 0.5 : std::max(0.1, 0.9 * std::pow(err, -0.2));
      if (step < 1e-300) throw Error(Errc::integration_failure, "step size underflow on the unstable manifold");
      continue;
    }
    State next = half;
    for (int i = 0; i < 3; ++i) next[i] += (half[i] - full[i]) / 15;
    if (next[0] <= 0 || next[1] < 0)
      throw Error(Errc::integration_failure, "trajectory left the admissible quadrant at q=" +
                                                 std::to_string(next[0]) + ", r=" + std::to_string(next[1]));
    const double dq_prev = F(y)[0], dq_next = F(next)[0];
    // 1 - a f sits at rounding level next to a flat-topped target; only a
    // definite reversal counts.
    if (F.sigma * dq_next < -1e-12)
      throw Error(Errc::integration_failure, fmt("charge is not monotone along the curve (dq/dt %.3e -> %.3e at r=%.6g)",
                                                 dq_prev, dq_next, next[1]));
    if (next[2] >= 1 || next[1] >= R) {
      // Locate the event inside the step by bisection on the step length.
      double lo = 0, hi = step;
      for (int k = 0; k < 80; ++k) {
        const double mid = 0.5 * (lo + hi);
        const State s = rk4(F, rk4(F, y, 0.5 * mid), 0.5 * mid);
        if (s[2] >= 1 || s[1] >= R) hi = mid;
        else lo = mid;
      }
      next = rk4(F, rk4(F, y, 0.5 * hi), 0.5 * hi);
      done = true;
    }
    y = next;
    push(y);
    step *= std::min(4.0, std::max(1.0, 0.9 * std::pow(std::max(err, 1e-30), -0.2)));
  }
  if (!done) throw Error(Errc::integration_failure, "unstable manifold did not terminate within the step budget");
  c.terminal_mass = y[2];
  c.terminal_radius = y[1];
  if (y[2] < 1 - 1e-4)
    throw Error(Errc::incompatible_target, "target support exhausted with particle mass " + std::to_string(y[2]));
  c.q_min = std::min(c.q.front(), c.q.back());
  c.q_max = std::max(c.q.front(), c.q.back());
  return c;
}

Reconstruction reconstruct_charge_density(const ManifoldCurve& c, const TargetDensity& f, const WeightSpec& g) {
  const int d = c.dimension;
  const auto geo = geometric_constants(d);
  const double kd = geo.k / d;
  std::vector<double> qs, nu;
  for (std::size_t k = 0; k < c.q.size(); ++k) {
    const double q = c.q[k], r = c.r[k];
    const double fr = f.f(std::min(r, f.support_radius));
    const double den = 1 - kd * q / g.value(q) * fr;
    const double drdq = (-(g.derivative(q) / g.value(q)) * r / d) / den;
    // dq/dt and dr/dt both vanish at the saddle; the first sample uses its neighbours.
    double v = std::abs(den) > 1e-9 ? geo.sphere_area * fr * std::pow(r, d - 1) * std::abs(drdq) : NAN;
    if (std::isfinite(v) && v < -1e-12) throw Error(Errc::integration_artifact, "negative charge density sample");
    qs.push_back(q);
    nu.push_back(v);
  }
  if (c.g_increasing) {
    std::reverse(qs.begin(), qs.end());
    std::reverse(nu.begin(), nu.end());
  }
  // Drop coincident nodes and fill undefined samples from neighbours.
  std::vector<double> q2, n2;
  for (std::size_t k = 0; k < qs.size(); ++k) {
    if (!q2.empty() && qs[k] - q2.back() <= 1e-14 * qs[k]) continue;
    q2.push_back(qs[k]);
    n2.push_back(nu[k]);
  }
  if (q2.size() < 3) throw Error(Errc::integration_artifact, "reconstructed curve is too short");
  for (std::size_t k = 0; k < n2.size(); ++k) {
    if (std::isfinite(n2[k])) continue;
    std::size_t a = k, b = k;
    while (a > 0 && !std::isfinite(n2[a])) --a;
    while (b + 1 < n2.size() && !std::isfinite(n2[b])) ++b;
    if (std::isfinite(n2[a]) && std::isfinite(n2[b]) && a != b)
      n2[k] = n2[a] + (n2[b] - n2[a]) * (q2[k] - q2[a]) / (q2[b] - q2[a]);
    else {
      // End sample: linear extrapolation from the two nearest defined ones.
      const std::size_t i1 = k == 0 ? 1 : k - 1, i2 = k == 0 ? 2 : k - 2;
      n2[k] = std::max(0.0, n2[i1] + (n2[i1] - n2[i2]) * (q2[k] - q2[i1]) / (q2[i1] - q2[i2]));
    }
  }
  for (auto& v : n2)
    if (v < 0) {
      if (v < -1e-12) throw Error(Errc::integration_artifact, "negative charge density sample");
      v = 0;
    }
  double mass = 0;
  for (std::size_t k = 0; k + 1 < q2.size(); ++k) mass += 0.5 * (n2[k] + n2[k + 1]) * (q2[k + 1] - q2[k]);
  if (std::abs(mass - 1) > 1e-4)
    throw Error(Errc::integration_artifact, "reconstructed density has mass " + std::to_string(mass));
  Reconstruction rec;
  rec.mass_before_normalization = mass;
  for (auto& v : n2) v /= mass;
  rec.q = q2;
  rec.nu = n2;
  rec.q_min = q2.front();
  rec.q_max = q2.back();
  rec.law = ChargeDistribution::tabulated(q2, n2, true);
  return rec;
}

Reconstruction reconstruct(const TargetDensity& f, const WeightSpec& g, int d, const StepControl& control) {
  return reconstruct_charge_density(integrate_unstable_manifold(f, g, d, control), f, g);
}

double pushforward_error(const Reconstruction& rec, const TargetDensity& f, const WeightSpec& g, int d,
                         double fraction, std::size_t points) {
  GasParams p;
  p.dimension = d;
  p.weight = g;
  p.charge_law = rec.law;
  const auto prof = continuous_profile(GasSpec(p));
  double worst = 0;
  const double f0 = f.f(0);
  for (std::size_t k = 0; k <= points; ++k) {
    const double r = fraction * f.support_radius * static_cast<double>(k) / points;
    worst = std::max(worst, std::abs(prof.rho(r) - f.f(r)) / f0);
  }
  return worst;
}

RoundtripReport verify_roundtrip(const TargetDensity& f, const WeightSpec& g, GasParams base, std::size_t n,
                                 std::size_t replicas, std::uint64_t seed, const AnnealSchedule& schedule,
                                 int threads, std::size_t bins, double fraction) {
  RoundtripReport rep;
  rep.reconstruction = reconstruct(f, g, base.dimension);
  base.weight = g;
  base.charge_law = rep.reconstruction.law;
  const GasSpec spec(base);
  auto runs = minimize_replicas(spec, n, schedule, seed, replicas, threads);
  std::vector<Configuration> configs;
  double order = 0;
  for (auto& r : runs) {
    if (!r.converged) ++rep.unconverged;
    order += ordering_metric(r.config);
    configs.push_back(std::move(r.config));
  }
  rep.n = n;
  rep.replicas = replicas;
  rep.ordering_mean = order / static_cast<double>(replicas);
  const int d = base.dimension;
  const auto geo = geometric_constants(d);
  const double R = f.support_radius;
  const auto hist = bins == 0 ? radial_profiles(configs, spacing_edges(d, n, R, fraction * R))
                              : radial_profiles(configs, bins, R);
  double sum2 = 0;
  for (std::size_t b = 0; b + 1 < hist.edges.size(); ++b) {
    if (hist.edges[b + 1] > fraction * f.support_radius) break;
    const double lo = hist.edges[b], hi = hist.edges[b + 1];
    const double avg = adaptive_simpson([&](double r) { return geo.sphere_area * std::pow(r, d - 1) * f.f(r); }, lo,
                                        hi, 1e-12) /
                       hist.bin_volume(b);
    const double rel = (hist.rho[b] - avg) / avg;
    rep.r.push_back(hist.center(b));
    rep.empirical.push_back(hist.rho[b]);
    rep.target.push_back(avg);
    rep.se.push_back(hist.rho_se[b]);
    sum2 += rel * rel;
    rep.sup_relative = std::max(rep.sup_relative, std::abs(rel));
  }
  if (rep.r.empty()) throw Error(Errc::domain, "no comparison bins inside the requested radius");
  rep.rms_relative = std::sqrt(sum2 / static_cast<double>(rep.r.size()));
  return rep;
}

}  // namespace hgas
