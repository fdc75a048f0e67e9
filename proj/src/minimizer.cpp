#include "hgas/minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>
#include <thread>
#include <atomic>
#include <exception>
#include <mutex>

#include "hgas/energy.hpp"
#include "hgas/equilibrium.hpp"
#include "hgas/error.hpp"

namespace hgas {
namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

struct Scales {
  double guard2;  // squared collision guard
  double cap;     // largest drift per particle per step
};

Scales scales_for(const GasSpec& spec, std::size_t n) {
  const double R = radius_estimate(spec);
  const double spacing = R / std::pow(static_cast<double>(n), 1.0 / spec.dimension());
  const double guard = std::max(1e-9 * R, coincidence_guard);
  return {guard * guard, 0.25 * spacing};
}

bool step_ok(const EnergyForces& ef, std::size_t i, std::size_t n, int d, double guard2) {
  if (!(ef.min_r2[i] >= guard2)) return false;
  for (int k = 0; k < d; ++k)
    if (!std::isfinite(ef.forces[k * n + i])) return false;
  return true;
}

void project_all(const GasSpec& spec, Configuration& c) {
  if (!spec.manifold()) return;
  std::vector<double> p(c.dim());
  for (std::size_t i = 0; i < c.size(); ++i) {
    c.get_point(i, p);
    spec.manifold()->project(p);
    c.set_point(i, p);
  }
}

// Removes normal components of an axis-major vector field on the manifold.
void tangent_field(const GasSpec& spec, const Configuration& c, std::vector<double>& v) {
  if (!spec.manifold()) return;
  const std::size_t n = c.size();
  const int d = c.dim();
  std::vector<double> p(d), w(d);
  for (std::size_t i = 0; i < n; ++i) {
    c.get_point(i, p);
    for (int k = 0; k < d; ++k) w[k] = v[k * n + i];
    spec.manifold()->tangent_project(p, w);
    for (int k = 0; k < d; ++k) v[k * n + i] = w[k];
  }
}

double residual_from(const Configuration& c, const GasSpec& spec, std::vector<double> f) {
  tangent_field(spec, c, f);
  const std::size_t n = c.size();
  const int d = c.dim();
  const double N2 = static_cast<double>(n) * static_cast<double>(n);
  double worst = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double f2 = 0;
    for (int k = 0; k < d; ++k) f2 += f[k * n + i] * f[k * n + i];
    const double q = c.charges()[i];
    worst = std::max(worst, std::sqrt(f2) / (N2 * q * std::max(1.0, spec.weight().value(q))));
  }
  return worst;
}

// One guarded Langevin update of x in place; forces are refreshed.
void step_once(const GasSpec& spec, const Scales& sc, Configuration& x, std::vector<double>& force, double beta,
               double eta, std::mt19937_64& rng) {
  const std::size_t n = x.size();
  const int d = x.dim();
  const double N2 = static_cast<double>(n) * static_cast<double>(n);
  const double noise_amp = std::isfinite(beta) ? std::sqrt(2 * eta / (beta * N2)) : 0.0;
  std::normal_distribution<double> n01;
  std::vector<double> disp(d * n);
  for (std::size_t i = 0; i < n; ++i) {
    double len2 = 0;
    for (int k = 0; k < d; ++k) {
      disp[k * n + i] = eta * force[k * n + i] / N2;
      len2 += disp[k * n + i] * disp[k * n + i];
    }
    const double len = std::sqrt(len2);
    if (len > sc.cap)
      for (int k = 0; k < d; ++k) disp[k * n + i] *= sc.cap / len;
  }
  if (noise_amp > 0)
    for (int k = 0; k < d; ++k)
      for (std::size_t i = 0; i < n; ++i) disp[k * n + i] += noise_amp * n01(rng);
  tangent_field(spec, x, disp);

  std::vector<double> mult(n, 1.0), p(d);
  for (int attempt = 0; attempt < 60; ++attempt) {
    Configuration trial = x;
    for (std::size_t i = 0; i < n; ++i) {
      if (mult[i] == 0) continue;
      for (int k = 0; k < d; ++k) trial.coord(i, k) += mult[i] * disp[k * n + i];
      if (spec.manifold()) {
        trial.get_point(i, p);
        spec.manifold()->project(p);
        trial.set_point(i, p);
      }
    }
    auto ef = evaluate(trial, spec, false, false);
    bool clean = true;
    for (std::size_t i = 0; i < n; ++i)
      if (!step_ok(ef, i, n, d, sc.guard2)) {
        clean = false;
        mult[i] = attempt >= 50 ? 0.0 : 0.5 * mult[i];
      }
    if (clean) {
      x = std::move(trial);
      force = std::move(ef.forces);
      return;
    }
  }
  throw Error(Errc::singular_configuration, "collision guard could not resolve a step");
}

}  // namespace

void AnnealSchedule::validate() const {
  if (!(beta0 > 0) || !(beta_growth > 1) || stages < 0 || steps_per_stage < 0 || !(step_size >= 0) ||
      !(step_decay > 0) || !(residual_threshold > 0) || max_descent_iterations < 0 || lbfgs_memory < 1 ||
      trace_every < 1)
    throw Error(Errc::domain, "invalid annealing schedule");
}

double default_step_size(const GasSpec& spec, std::size_t n) {
  const double qmax = spec.charge_law().q_max();
  return 0.1 * static_cast<double>(n) / (qmax * qmax + qmax * spec.max_weight());
}

double radius_estimate(const GasSpec& spec) {
  if (spec.manifold()) return 1.0;
  try {
    return predicted_profile(spec).support_radius;
  } catch (const Error&) {
  }
  const auto& law = spec.charge_law();
  const double q = law.mean();
  return std::pow(spec.geometry().c * q / spec.weight().value(q), 1.0 / spec.dimension());
}

double residual_force_norm(const Configuration& config, const GasSpec& spec) {
  return residual_from(config, spec, evaluate(config, spec, false).forces);
}

Configuration initial_configuration(const GasSpec& spec, std::size_t n, std::uint64_t seed, SamplingMode mode) {
  if (n < 1) throw Error(Errc::domain, "need at least one particle");
  const int d = spec.dimension();
  Configuration c(d, n);
  auto q = sample_charges(spec.charge_law(), n, seed, mode);
  std::copy(q.begin(), q.end(), c.charges().begin());
  std::mt19937_64 rng(seed ^ 0x9E3779B97F4A7C15ULL);
  if (spec.manifold()) {
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<double> p(d);
    for (std::size_t i = 0; i < n; ++i) {
      const double a = u(rng), b = u(rng), e = u(rng);
      spec.manifold()->random_point(a, b, e, p);
      spec.manifold()->project(p);
      c.set_point(i, p);
    }
    c.set_manifold_tag(spec.manifold()->name());
    return c;
  }
  // Per-axis variance R^2 / (d + 2) matches the second moment of the uniform ball.
  const double sigma = radius_estimate(spec) / std::sqrt(d + 2.0);
  std::normal_distribution<double> n01;
  for (int k = 0; k < d; ++k)
    for (std::size_t i = 0; i < n; ++i) c.coord(i, k) = sigma * n01(rng);
  return c;
}

Configuration langevin_step(const Configuration& config, const GasSpec& spec, double beta, double step,
                            std::uint64_t seed) {
  if (!(beta > 0) || !(step > 0)) throw Error(Errc::domain, "beta and step must be positive");
  config.validate(spec);
  std::mt19937_64 rng(seed);
  Configuration x = config;
  auto force = evaluate(x, spec, false).forces;
  step_once(spec, scales_for(spec, x.size()), x, force, beta, step, rng);
  return x;
}

MinimizeResult descend(const GasSpec& spec, Configuration x, const AnnealSchedule& schedule,
                       const StepObserver& observer) {
  schedule.validate();
  const std::size_t n = x.size();
  const int d = x.dim();
  const double N2 = static_cast<double>(n) * static_cast<double>(n);
  const Scales sc = scales_for(spec, n);
  const std::size_t len = d * n;

  auto ef = evaluate(x, spec, true);
  double f = ef.energy / N2;
  std::vector<double> g(len);
  for (std::size_t k = 0; k < len; ++k) g[k] = -ef.forces[k] / N2;
  tangent_field(spec, x, g);

  std::deque<std::vector<double>> S, Y;
  std::deque<double> rho;
  MinimizeResult res;
  auto record = [&](long it) {
    res.trace.push_back({it, f * N2, residual_from(x, spec, ef.forces), inf});
  };

  int it = 0;
  double residual = residual_from(x, spec, ef.forces);
  for (; it < schedule.max_descent_iterations && residual > schedule.residual_threshold; ++it) {
    if (it % 10 == 0) record(it);
    // Two-loop recursion.
    std::vector<double> dir(g.size());
    for (std::size_t k = 0; k < len; ++k) dir[k] = -g[k];
    std::vector<double> alpha(S.size());
    for (std::size_t m = S.size(); m-- > 0;) {
      double a = 0;
      for (std::size_t k = 0; k < len; ++k) a += S[m][k] * dir[k];
      a *= rho[m];
      alpha[m] = a;
      for (std::size_t k = 0; k < len; ++k) dir[k] -= a * Y[m][k];
    }
    if (!S.empty()) {
      double sy = 0, yy = 0;
      for (std::size_t k = 0; k < len; ++k) {
        sy += S.back()[k] * Y.back()[k];
        yy += Y.back()[k] * Y.back()[k];
      }
      const double gamma = sy / yy;
      for (auto& v : dir) v *= gamma;
    }
    for (std::size_t m = 0; m < S.size(); ++m) {
      double b = 0;
      for (std::size_t k = 0; k < len; ++k) b += Y[m][k] * dir[k];
      b *= rho[m];
      for (std::size_t k = 0; k < len; ++k) dir[k] += (alpha[m] - b) * S[m][k];
    }
    tangent_field(spec, x, dir);
    double gd = 0, gg = 0, dd = 0;
    for (std::size_t k = 0; k < len; ++k) {
      gd += g[k] * dir[k];
      gg += g[k] * g[k];
      dd += dir[k] * dir[k];
    }
    if (!(gd < -1e-12 * std::sqrt(gg * dd))) {
      S.clear();
      Y.clear();
      rho.clear();
      for (std::size_t k = 0; k < len; ++k) dir[k] = -g[k];
      gd = -gg;
    }
    // First trial moves no particle further than the drift cap.
    double longest = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double l2 = 0;
      for (int k = 0; k < d; ++k) l2 += dir[k * n + i] * dir[k * n + i];
      longest = std::max(longest, std::sqrt(l2));
    }
    double step = S.empty() ? sc.cap / std::max(longest, 1e-300) : std::min(1.0, sc.cap / std::max(longest, 1e-300));

    bool accepted = false;
    Configuration trial;
    EnergyForces tef;
    for (int bt = 0; bt < 50; ++bt, step *= 0.5) {
      trial = x;
      auto coords = trial.coords();
      for (std::size_t k = 0; k < len; ++k) coords[k] += step * dir[k];
      project_all(spec, trial);
      tef = evaluate(trial, spec, true, false);
      bool clean = std::isfinite(tef.energy);
      for (std::size_t i = 0; clean && i < n; ++i) clean = step_ok(tef, i, n, d, sc.guard2);
      if (!clean) continue;
      if (tef.energy / N2 <= f + 1e-4 * step * gd) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (S.empty()) break;  // no descent possible at working precision
      S.clear();
      Y.clear();
      rho.clear();
      continue;
    }
    std::vector<double> gn(len);
    for (std::size_t k = 0; k < len; ++k) gn[k] = -tef.forces[k] / N2;
    tangent_field(spec, trial, gn);
    std::vector<double> s(len), y(len);
    double sy = 0, ss = 0, yy = 0;
    const auto xo = x.coords(), xn = trial.coords();
    for (std::size_t k = 0; k < len; ++k) {
      s[k] = xn[k] - xo[k];
      y[k] = gn[k] - g[k];
      sy += s[k] * y[k];
      ss += s[k] * s[k];
      yy += y[k] * y[k];
    }
    if (sy > 1e-12 * std::sqrt(ss * yy)) {
      S.push_back(std::move(s));
      Y.push_back(std::move(y));
      rho.push_back(1 / sy);
      if (static_cast<int>(S.size()) > schedule.lbfgs_memory) {
        S.pop_front();
        Y.pop_front();
        rho.pop_front();
      }
    }
    x = std::move(trial);
    if (observer) observer(x);
    ef = std::move(tef);
    f = ef.energy / N2;
    g = std::move(gn);
    residual = residual_from(x, spec, ef.forces);
  }
  record(it);
  res.descent_iterations = it;
  res.residual = residual;
  res.energy = ef.energy;
  res.converged = residual <= schedule.residual_threshold;
  res.config = std::move(x);
  return res;
}

MinimizeResult minimize_from(const GasSpec& spec, Configuration x, const AnnealSchedule& schedule,
                             std::uint64_t seed, const StepObserver& observer) {
  schedule.validate();
  x.validate(spec);
  if (x.size() < 2) throw Error(Errc::domain, "minimize needs at least two particles");
  const std::size_t n = x.size();
  const Scales sc = scales_for(spec, n);
  const double eta0 = schedule.step_size > 0 ? schedule.step_size : default_step_size(spec, n);
  std::mt19937_64 rng(seed);
  auto force = evaluate(x, spec, false).forces;

  std::vector<TraceRow> trace;
  long step = 0;
  double beta = schedule.beta0, eta = eta0;
  for (int stage = 0; stage < schedule.stages; ++stage) {
    for (int t = 0; t < schedule.steps_per_stage; ++t, ++step) {
      step_once(spec, sc, x, force, beta, eta, rng);
      if (observer) observer(x);
      if (step % schedule.trace_every == 0) trace.push_back({step, total_energy(x, spec), residual_from(x, spec, force), beta});
    }
    beta *= schedule.beta_growth;
    eta *= schedule.step_decay;
  }
  auto res = descend(spec, std::move(x), schedule, observer);
  for (auto& row : res.trace) row.step += step;
  trace.insert(trace.end(), res.trace.begin(), res.trace.end());
  res.trace = std::move(trace);
  return res;
}

MinimizeResult minimize(const GasSpec& spec, std::size_t n, const AnnealSchedule& schedule, std::uint64_t seed,
                        SamplingMode mode, const StepObserver& observer) {
  if (n < 2) throw Error(Errc::domain, "minimize needs at least two particles");
  return minimize_from(spec, initial_configuration(spec, n, seed, mode), schedule, seed + 0x5851F42D4C957F2DULL,
                       observer);
}

std::vector<MinimizeResult> minimize_replicas(const GasSpec& spec, std::size_t n, const AnnealSchedule& schedule,
                                              std::uint64_t seed, std::size_t replicas, int threads,
                                              SamplingMode mode) {
  std::vector<MinimizeResult> out(replicas);
  const std::size_t workers = std::clamp<std::size_t>(threads < 1 ? 1 : threads, 1, std::max<std::size_t>(replicas, 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < replicas;) {
      try {
        out[k] = minimize(spec, n, schedule, seed + k, mode);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace hgas
