// Acceptance checks. One PASS/FAIL line per criterion; --only selects a subset.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "hgas/energy.hpp"
#include "hgas/equilibrium.hpp"
#include "hgas/error.hpp"
#include "hgas/inverse.hpp"
#include "hgas/minimizer.hpp"
#include "hgas/quadrature.hpp"
#include "hgas/stats.hpp"

using namespace hgas;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  bool finding = false;  // reported, never gates the exit code
};

struct Options {
  int threads = 1;
  std::uint64_t seed = 20240611;
  bool smoke = false;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

AnnealSchedule schedule() {
  AnnealSchedule a;
  a.stages = 10;
  a.steps_per_stage = 100;
  a.beta0 = 1;
  a.beta_growth = std::pow(1e6, 1.0 / (a.stages - 1));
  return a;
}

GasSpec gas(WeightSpec w, ChargeDistribution law, int d = 2, KernelSpec k = KernelSpec::coulomb()) {
  GasParams p;
  p.dimension = d;
  p.kernel = k;
  p.weight = std::move(w);
  p.charge_law = std::move(law);
  return GasSpec(p);
}

std::vector<Configuration> configs_of(const std::vector<MinimizeResult>& rs, int& unconverged) {
  std::vector<Configuration> out;
  unconverged = 0;
  for (const auto& r : rs) {
    out.push_back(r.config);
    if (!r.converged) ++unconverged;
  }
  return out;
}

// Predicted bin averages from the enclosed mass and charge.
struct BinPrediction {
  double rho, rho_q, mean_q;
};
BinPrediction bin_prediction(const EquilibriumProfile& p, const RadialHistogram& h, std::size_t b) {
  const double lo = h.edges[b], hi = h.edges[b + 1];
  const double dm = p.enclosed_mass(hi) - p.enclosed_mass(lo);
  const double dq = p.enclosed_charge(hi) - p.enclosed_charge(lo);
  const double v = h.bin_volume(b);
  return {dm / v, dq / v, dm > 0 ? dq / dm : std::nan("")};
}

Outcome c1_circular_law(const Options& o) {
  const auto spec = gas(WeightSpec::constant(1), ChargeDistribution::uniform(1, 2));
  const auto prof = predicted_profile(spec);
  const double R = prof.support_radius;
  const auto rs = minimize_replicas(spec, 500, schedule(), o.seed, 8, o.threads);
  int unconv = 0;
  const auto cs = configs_of(rs, unconv);
  // Annuli two mean spacings wide (spacing_edges); narrower bins resolve the
  // ring rows near the edge instead of the density.
  const auto h = radial_profiles(cs, spacing_edges(2, 500, R, 0.8 * R));
  const int nb = static_cast<int>(h.rho_q.size());
  const double pred = 2 / spec.geometry().k;  // d / k_d
  double worst = 0;
  for (std::size_t b = 0; b < h.rho_q.size(); ++b) worst = std::max(worst, std::abs(h.rho_q[b] - pred) / pred);
  double rmax = 0;
  for (const auto& c : cs) {
    double m = 0;
    for (std::size_t i = 0; i < c.size(); ++i) m = std::max(m, c.radius(i));
    rmax += m / cs.size();
  }
  const double rerr = std::abs(rmax - std::sqrt(1.5)) / std::sqrt(1.5);
  const double perr = std::abs(prof.rho_q(0.1) - pred) / pred;
  Outcome out;
  out.pass = worst < 0.05 && rerr < 0.03 && std::abs(R - std::sqrt(1.5)) < 1e-12 && perr < 1e-12 && unconv == 0;
  out.detail = fmt("%d annuli, max |rho_q-1/pi|/(1/pi) on r<0.8R = %.4f (<0.05); support radius %.5f vs %.5f, rel %.4f (<0.03); "
                   "unconverged %d",
                   nb, worst, rmax, std::sqrt(1.5), rerr, unconv);
  return out;
}

Outcome c2_shells(const Options& o) {
  const auto spec = gas(WeightSpec::linear(),
                        ChargeDistribution::atomic({{1, 1.0 / 3}, {2, 1.0 / 3}, {3, 1.0 / 3}}));
  const double expect[6] = {0, 0.5774, 0.7071, 0.9129, 1.2910, 1.4142};
  const auto layout = shell_layout(spec);
  double oracle = 0;
  for (std::size_t s = 0; s < 3; ++s) {
    oracle = std::max(oracle, std::abs(layout.shells[s].inner_radius - expect[2 * s]));
    oracle = std::max(oracle, std::abs(layout.shells[s].outer_radius - expect[2 * s + 1]));
  }
  const auto res = minimize(spec, 600, schedule(), o.seed, SamplingMode::stratified);
  const auto& c = res.config;
  // Shells are listed by radius; g increasing puts q = 3 innermost.
  double lo[3] = {1e300, 1e300, 1e300}, hi[3] = {0, 0, 0};
  for (std::size_t i = 0; i < c.size(); ++i) {
    int s = 0;
    while (std::abs(layout.shells[s].charge - c.charges()[i]) > 1e-9) ++s;
    lo[s] = std::min(lo[s], c.radius(i));
    hi[s] = std::max(hi[s], c.radius(i));
  }
  // Relative 5% everywhere except the zero inner edge, where 5% of the outer radius is used.
  const double Rout = expect[5];
  double worst = 0;
  bool ok = true;
  std::string per;
  for (int s = 0; s < 3; ++s)
    for (int e = 0; e < 2; ++e) {
      const double meas = e ? hi[s] : lo[s], ref = expect[2 * s + e];
      const double err = ref > 0 ? std::abs(meas - ref) / ref : std::abs(meas) / Rout;
      worst = std::max(worst, err);
      ok = ok && err < 0.05;
      per += fmt("%s%.4f", per.empty() ? "" : ",", meas);
    }
  int in_gap = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double r = c.radius(i);
    if ((r > expect[1] * 1.05 && r < expect[2] * 0.95) || (r > expect[3] * 1.05 && r < expect[4] * 0.95)) ++in_gap;
  }
  Outcome out;
  out.pass = ok && in_gap == 0 && oracle < 1e-4 && res.converged;
  out.detail = fmt("radii [%s], worst rel err %.4f (<0.05); particles in gaps %d; layout vs derived radii %.1e; "
                   "converged %d",
                   per.c_str(), worst, in_gap, oracle, int(res.converged));
  return out;
}

Outcome c3_continuous(const Options& o) {
  const auto spec = gas(WeightSpec::linear(), ChargeDistribution::uniform(1, 2));
  const auto prof = predicted_profile(spec);
  const double R = prof.support_radius;
  const auto qr = [](double r) { return -r * r + std::sqrt(r * r * r * r + 4); };
  double oracle = 0;
  for (int k = 0; k < 50; ++k) {
    const double r = (k + 0.5) / 50 * R;
    oracle = std::max(oracle, std::abs(prof.charge_at(r) - qr(r)));
  }
  const auto rs = minimize_replicas(spec, 1000, schedule(), o.seed, 20, o.threads);
  int unconv = 0;
  const auto cs = configs_of(rs, unconv);
  const auto h = radial_profiles(cs, 20, R);
  // The SE test covers the bulk r < R - 2a (a the mean spacing); the outermost
  // row of particles is reported separately.
  const double bulk = R - 2 * std::sqrt(std::numbers::pi * R * R / 1000);
  double ss = 0, worst_se = 0, edge_se = 0;
  int nq = 0;
  std::size_t worst_bin = 0;
  for (std::size_t b = 0; b < h.rho.size(); ++b) {
    // Closed-form q(r) averaged over the particles of the bin.
    const double lo = h.edges[b], hi = h.edges[b + 1];
    const double m = integrate_split([&](double r) { return prof.rho(r) * r; }, lo, hi, {});
    const double mq = integrate_split([&](double r) { return qr(r) * prof.rho(r) * r; }, lo, hi, {});
    if (!h.empty[b]) {
      const double d = h.mean_charge[b] - mq / m;
      ss += d * d;
      ++nq;
    }
    const double pred = bin_prediction(prof, h, b).rho;
    const double z = std::abs(h.rho[b] - pred) / h.rho_se[b];
    if (h.edges[b + 1] > bulk) {
      edge_se = std::max(edge_se, z);
    } else if (z > worst_se) {
      worst_se = z;
      worst_bin = b;
    }
  }
  const double rms = std::sqrt(ss / std::max(nq, 1));
  Outcome out;
  out.pass = rms < 0.05 && worst_se < 3 && oracle < 1e-6 && unconv == 0;
  out.detail = fmt("mean-charge RMS %.4f (<0.05); max |rho-pred|/SE on r<%.3f %.2f (<3) at bin %zu of %zu "
                   "[%.3f,%.3f], edge row %.2f (not gated); q(r) closed form vs profile %.1e; unconverged %d",
                   rms, bulk, worst_se, worst_bin, h.rho.size(), h.edges[worst_bin], h.edges[worst_bin + 1], edge_se,
                   oracle, unconv);
  return out;
}

Outcome ordering_pattern(const Options& o, KernelSpec k, double strong, double weak, std::size_t n) {
  const WeightSpec ws[3] = {WeightSpec::linear(), WeightSpec::inverse_sqrt(), WeightSpec::constant(1)};
  double m[3];
  bool conv = true;
  for (int j = 0; j < 3; ++j) {
    const auto spec = gas(ws[j], ChargeDistribution::uniform(1, 2), 2, k);
    const auto r = minimize(spec, n, schedule(), o.seed + j);
    conv = conv && r.converged;
    m[j] = ordering_metric(r.config);
  }
  Outcome out;
  out.pass = m[0] < -strong && m[1] > strong && std::abs(m[2]) < weak && conv;
  out.detail = fmt("g=q %.4f (<-%.2f), g=1/sqrt(q) %.4f (>%.2f), g=1 %.4f (|.|<%.2f); converged %d", m[0], strong,
                   m[1], strong, m[2], weak, int(conv));
  return out;
}

Outcome c4_ordering(const Options& o) { return ordering_pattern(o, KernelSpec::coulomb(), 0.95, 0.2, 1000); }

Outcome c5_inverse(const Options& o) {
  const auto f = TargetDensity::fig7();
  const auto g = WeightSpec::inverse();
  // Independent oracle: a(q) f(0) = 1 with a(q) = pi q^2 for g = 1/q in d = 2.
  const double oracle = bisect([&](double q) { return std::numbers::pi * q * q * f.f(0) - 1; }, 0.1, 2.0, 1e-15);
  const auto rec = reconstruct(f, g, 2);
  const double qerr = std::abs(rec.q_min - oracle);
  const std::size_t replicas = o.smoke ? 10 : 100;
  const double tol = o.smoke ? 0.10 : 0.05;
  GasParams base;
  const auto rep = verify_roundtrip(f, g, base, 1000, replicas, o.seed, schedule(), o.threads, 0, 0.95);
  Outcome out;
  out.pass = qerr < 1e-6 && std::abs(oracle - 0.81650) < 5e-6 && rep.rms_relative < tol && rep.unconverged == 0;
  out.detail = fmt("%s: q_min %.7f vs oracle %.7f (err %.1e, <1e-6); %zu replicas, %zu annuli on r<0.95, RMS %.4f "
                   "(<%.2f), sup %.4f, ordering %.3f, unconverged %d",
                   o.smoke ? "smoke" : "full", rec.q_min, oracle, qerr, replicas, rep.r.size(), rep.rms_relative, tol,
                   rep.sup_relative, rep.ordering_mean, rep.unconverged);
  return out;
}

Outcome c6_splitting(const Options& o) {
  struct Case {
    const char* name;
    WeightSpec w;
    ChargeDistribution law;
    int d;
  };
  const Case cases[] = {
      {"d2 g=1", WeightSpec::constant(1), ChargeDistribution::uniform(1, 2), 2},
      {"d2 g=q", WeightSpec::linear(), ChargeDistribution::uniform(1, 2), 2},
      {"d2 g=1/sqrt(q)", WeightSpec::inverse_sqrt(), ChargeDistribution::uniform(1, 2), 2},
      {"d2 atoms g=q", WeightSpec::linear(), ChargeDistribution::atomic({{1, 1.0 / 3}, {2, 1.0 / 3}, {3, 1.0 / 3}}), 2},
      {"d3 g=q", WeightSpec::linear(), ChargeDistribution::uniform(1, 2), 3},
      {"d3 g=1", WeightSpec::constant(1), ChargeDistribution::uniform(1, 2), 3},
  };
  double worst = 0;
  int count = 0;
  for (const auto& cs : cases) {
    const auto spec = gas(cs.w, cs.law, cs.d);
    const auto prof = predicted_profile(spec);
    for (int k = 0; k < 4; ++k) {
      auto c = initial_configuration(spec, 60 + 40 * k, o.seed + k);
      if (k == 3) c = descend(spec, c, schedule()).config;
      const auto s = splitting_terms(c, prof, spec);
      const double total = total_energy(c, spec);
      const double rel = std::abs(s.leading + s.zeta_term + s.quadratic_remainder - total) / std::abs(total);
      worst = std::max(worst, rel);
      ++count;
    }
  }
  Outcome out;
  out.pass = worst < 1e-6;
  out.detail = fmt("%d configurations, max relative residual %.2e (<1e-6)", count, worst);
  return out;
}

Outcome c7_nlogn(const Options& o) {
  const auto spec = gas(WeightSpec::constant(1), ChargeDistribution::uniform(1, 2));
  const auto prof = predicted_profile(spec);
  const std::size_t ns[3] = {200, 400, 800};
  const int reps = 3;
  // Least squares for D(N) = a N log N + b N with D = leading - total.
  double s11 = 0, s12 = 0, s22 = 0, t1 = 0, t2 = 0;
  std::string per;
  for (std::size_t n : ns) {
    const auto rs = minimize_replicas(spec, n, schedule(), o.seed + n, reps, o.threads, SamplingMode::stratified);
    double mean = 0;
    for (const auto& r : rs) {
      const auto s = splitting_terms(r.config, prof, spec);
      mean += (s.leading - s.total_check) / reps;
    }
    const double N = static_cast<double>(n), x1 = N * std::log(N), x2 = N;
    s11 += x1 * x1, s12 += x1 * x2, s22 += x2 * x2, t1 += x1 * mean, t2 += x2 * mean;
    per += fmt("%sN=%zu D/(N log N)=%.4f", per.empty() ? "" : ", ", n, mean / x1);
  }
  const double det = s11 * s22 - s12 * s12;
  const double a = (t1 * s22 - t2 * s12) / det, b = (s11 * t2 - s12 * t1) / det;
  const double target = spec.charge_law().second_moment() / 2;
  const double rel = std::abs(a - target) / target;
  Outcome out;
  out.finding = true;
  out.pass = rel < 0.25;
  out.detail = fmt("fitted a=%.4f b=%.4f, target <q^2>/2=%.4f, rel %.3f (<0.25); %s", a, b, target, rel, per.c_str());
  return out;
}

Outcome c8_gradients(const Options& o) {
  struct Case {
    const char* name;
    int d;
    KernelSpec k;
  };
  const Case cases[] = {
      {"coulomb d2", 2, KernelSpec::coulomb()},     {"coulomb d3", 3, KernelSpec::coulomb()},
      {"riesz +0.5 d2", 2, KernelSpec::riesz(0.5)}, {"riesz -0.5 d2", 2, KernelSpec::riesz(-0.5)},
      {"riesz +0.5 d3", 3, KernelSpec::riesz(0.5)}, {"riesz -0.5 d3", 3, KernelSpec::riesz(-0.5)},
  };
  double worst = 0;
  std::string where;
  for (const auto& cs : cases) {
    const auto spec = gas(WeightSpec::linear(), ChargeDistribution::uniform(1, 2), cs.d, cs.k);
    for (int t = 0; t < 10; ++t) {
      const auto c = initial_configuration(spec, 40, o.seed + 100 * t);
      const auto F = forces(c, spec);
      const std::size_t n = c.size();
      for (std::size_t i = 0; i < n; ++i) {
        double num = 0, den = 0;
        for (int k = 0; k < cs.d; ++k) {
          const double h = 1e-5;
          auto p = c, m = c;
          p.coord(i, k) += h;
          m.coord(i, k) -= h;
          const double fd = -(total_energy(p, spec) - total_energy(m, spec)) / (2 * h);
          const double a = F[k * n + i];
          num += (a - fd) * (a - fd);
          den += a * a;
        }
        const double rel = std::sqrt(num / den);
        if (rel > worst) {
          worst = rel;
          where = cs.name;
        }
      }
    }
  }
  Outcome out;
  out.pass = worst < 1e-5;
  out.detail = fmt("6 kernels x 10 configs x 40 particles, max per-particle relative error %.2e (<1e-5) in %s", worst,
                   where.c_str());
  return out;
}

Outcome c9_generalized(const Options& o) {
  const auto a = ordering_pattern(o, KernelSpec::riesz(0.5), 0.9, 0.3, 1000);
  const auto b = ordering_pattern(o, KernelSpec::riesz(-0.5), 0.9, 0.3, 1000);
  Outcome out;
  out.pass = a.pass && b.pass;
  out.detail = "eta=+0.5: " + a.detail + "; eta=-0.5: " + b.detail;
  return out;
}

Outcome c10_manifold(const Options& o) {
  const WeightSpec ws[3] = {WeightSpec::linear(), WeightSpec::inverse_sqrt(), WeightSpec::constant(1)};
  double corr[3];
  double worst_constraint = 0;
  long observed = 0;
  bool conv = true;
  for (int j = 0; j < 3; ++j) {
    GasParams p;
    p.dimension = 3;
    p.weight = ws[j];
    p.charge_law = ChargeDistribution::uniform(1, 2);
    p.confinement = ConfinementSpec::coordinate_square(2);
    p.manifold = ManifoldSpec::unit_sphere();
    const GasSpec spec(p);
    const auto& M = *spec.manifold();
    const auto check = [&](const Configuration& c) {
      double pt[3];
      for (std::size_t i = 0; i < c.size(); ++i) {
        c.get_point(i, pt);
        worst_constraint = std::max(worst_constraint, std::abs(M.value(pt)));
      }
      ++observed;
    };
    check(initial_configuration(spec, 1000, o.seed + j));
    const auto r = minimize(spec, 1000, schedule(), o.seed + j, SamplingMode::iid, check);
    conv = conv && r.converged;
    corr[j] = axis_ordering_metric(r.config, 2);
  }
  Outcome out;
  out.pass = worst_constraint < 1e-10 && corr[0] < -0.9 && corr[1] > 0.9 && std::abs(corr[2]) < 0.2 && conv;
  out.detail = fmt("max |F(x)| over %ld observed steps %.1e (<1e-10); rank corr(q,|z|): g=q %.4f (<-0.9), "
                   "g=1/sqrt(q) %.4f (>0.9), g=1 %.4f (|.|<0.2); converged %d",
                   observed, worst_constraint, corr[0], corr[1], corr[2], int(conv));
  return out;
}

Outcome c11_correlation(const Options& o) {
  const double fr[3] = {0.2, 0.5, 0.8};
  std::vector<double> edges;
  for (int b = 0; b <= 40; ++b) edges.push_back(4.0 * b / 40);
  const std::size_t n = 1000, replicas = 40;
  const auto curves = [&](const GasSpec& spec, std::uint64_t seed, int& unconv) {
    const double R = predicted_profile(spec).support_radius;
    const auto cs = configs_of(minimize_replicas(spec, n, schedule(), seed, replicas, o.threads), unconv);
    std::vector<CorrelationCurve> out;
    for (double f : fr) out.push_back(local_pair_correlation(cs, f * R, 0.1 * R, edges));
    return out;
  };
  // r0-independence is claimed for the g = 1 gas with nu uniform on [1, 5];
  // identical unit charges (an ordered, lattice-like ground state) are reported only.
  const auto worst_pair = [](const std::vector<CorrelationCurve>& c) {
    double m = 0;
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b) m = std::max(m, curve_discrepancy(c[a], c[b]));
    return m;
  };
  int u1 = 0, u2 = 0, u3 = 0;
  const auto flat = curves(gas(WeightSpec::constant(1), ChargeDistribution::uniform(1, 5)), o.seed, u1);
  const auto het = curves(gas(WeightSpec::linear(), ChargeDistribution::uniform(1, 5)), o.seed + 1000, u2);
  const auto unit = curves(gas(WeightSpec::constant(1), ChargeDistribution::atomic({{1, 1}})), o.seed + 2000, u3);
  const double disc = worst_pair(flat), unit_disc = worst_pair(unit);
  double pk[3];
  for (int a = 0; a < 3; ++a) pk[a] = first_peak(het[a]);
  Outcome out;
  out.pass = disc < 3 && pk[0] < pk[1] && pk[1] < pk[2] && u1 + u2 == 0;
  out.detail = fmt("g=1 max pairwise discrepancy %.2f SE (<3); g=q first peaks %.4f, %.4f, %.4f "
                   "(strictly increasing); unit charges %.2f SE (not gated); %zu replicas x N=%zu per gas; "
                   "unconverged %d",
                   disc, pk[0], pk[1], pk[2], unit_disc, replicas, n, u1 + u2 + u3);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hgas acceptance checks"};
  std::vector<int> only;
  Options opt;
  app.add_option("--only", only, "criterion numbers to run (default all)")->check(CLI::Range(1, 11));
  app.add_flag("--smoke", opt.smoke, "10-replica version of criterion 5");
  app.add_option("--threads", opt.threads, "worker threads for replicas")->check(CLI::PositiveNumber);
  app.add_option("--seed", opt.seed, "base seed");
  CLI11_PARSE(app, argc, argv);

  const std::map<int, std::pair<const char*, std::function<Outcome(const Options&)>>> table = {
      {1, {"circular law", c1_circular_law}},       {2, {"shell segregation", c2_shells}},
      {3, {"continuous profile", c3_continuous}},   {4, {"ordering transition", c4_ordering}},
      {5, {"inverse design roundtrip", c5_inverse}}, {6, {"splitting identity", c6_splitting}},
      {7, {"N log N coefficient", c7_nlogn}},       {8, {"gradient correctness", c8_gradients}},
      {9, {"generalized gases", c9_generalized}},   {10, {"manifolds", c10_manifold}},
      {11, {"pair correlation", c11_correlation}},
  };
  int failures = 0;
  for (const auto& [id, entry] : table) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome r;
    try {
      r = entry.second(opt);
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const char* tag = r.finding ? (r.pass ? "PASS (finding)" : "FAIL (finding, not gating)") : (r.pass ? "PASS" : "FAIL");
    std::printf("[%s] criterion %d %s: %s (%.1f s)\n", tag, id, entry.first, r.detail.c_str(), secs);
    std::fflush(stdout);
    if (!r.pass && !r.finding) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
