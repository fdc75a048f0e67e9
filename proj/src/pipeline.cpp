#include "hgas/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <json.hpp>

#include "hgas/energy.hpp"
#include "hgas/equilibrium.hpp"
#include "hgas/error.hpp"
#include "hgas/inverse.hpp"
#include "hgas/io.hpp"
#include "hgas/stats.hpp"

namespace hgas {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

void say(const Logger& log, const std::string& msg) {
  if (log) log(msg);
}

std::string out_path(const ScenarioConfig& c, const std::string& file) {
  fs::create_directories(c.output.directory);
  return (fs::path(c.output.directory) / file).string();
}

bool wants(const ScenarioConfig& c, const std::string& observable) {
  for (const auto& o : c.analysis.observables)
    if (o == observable) return true;
  return false;
}

bool wants_format(const ScenarioConfig& c, const std::string& f) {
  for (const auto& o : c.output.formats)
    if (o == f) return true;
  return false;
}

std::string replica_tag(std::size_t k) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "r%03zu", k);
  return buf;
}

std::string fixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

/// Charge ordering: radius in free space, |x_axis| of the confinement on a manifold.
double ordering_of(const Configuration& c, const GasSpec& spec) {
  if (spec.manifold() && spec.confinement().family() == ConfinementSpec::Family::coordinate_square)
    return axis_ordering_metric(c, spec.confinement().axis());
  return ordering_metric(c);
}

TargetDensity target_of(const InverseConfig& ic) {
  if (ic.target == "fig7") return TargetDensity::fig7();
  if (ic.target == "parabolic") return TargetDensity::parabolic();
  return TargetDensity::from_csv(ic.target);
}

}  // namespace

std::vector<Configuration> load_checkpoints(const std::string& directory) {
  std::vector<std::string> files;
  if (!fs::is_directory(directory)) throw Error(Errc::io, "no such directory " + directory);
  for (const auto& e : fs::directory_iterator(directory)) {
    const auto name = e.path().filename().string();
    if (name.rfind("checkpoint_r", 0) == 0) files.push_back(e.path().string());
  }
  std::sort(files.begin(), files.end());
  // Prefer the CSV copy when both formats exist.
  std::vector<Configuration> out;
  for (std::size_t k = 0; k < files.size(); ++k) {
    const fs::path p(files[k]);
    if (p.extension() == ".bin") {
      auto csv = p;
      csv.replace_extension(".csv");
      if (fs::exists(csv)) continue;
    }
    out.push_back(read_checkpoint(files[k]));
  }
  if (out.empty()) throw Error(Errc::io, "no checkpoints in " + directory);
  return out;
}

SimulationResult run_simulate(const ScenarioConfig& cfg, const Logger& log) {
  const GasSpec spec = cfg.gas.build();
  const auto mode = cfg.run.sampling == "stratified" ? SamplingMode::stratified : SamplingMode::iid;
  SimulationResult res;
  if (!cfg.run.resume.empty()) {
    say(log, "resuming from " + cfg.run.resume);
    auto start = read_checkpoint(cfg.run.resume);
    start.validate(spec);
    res.runs.push_back(minimize_from(spec, std::move(start), cfg.run.schedule, cfg.run.seed));
  } else {
    say(log, "simulating " + std::to_string(cfg.run.replicas) + " replica(s) of N=" + std::to_string(cfg.run.n));
    res.runs = minimize_replicas(spec, cfg.run.n, cfg.run.schedule, cfg.run.seed, cfg.run.replicas, cfg.run.threads,
                                 mode);
  }
  json summary;
  summary["scenario"] = cfg.name;
  summary["n"] = cfg.run.n;
  summary["seed"] = cfg.run.seed;
  json reps = json::array();
  for (std::size_t k = 0; k < res.runs.size(); ++k) {
    const auto& r = res.runs[k];
    if (!r.converged) ++res.unconverged;
    const std::string tag = replica_tag(k);
    const std::vector<std::pair<std::string, std::string>> meta{{"scenario", cfg.name},
                                                                {"seed", std::to_string(cfg.run.seed + k)},
                                                                {"energy", format_double(r.energy)},
                                                                {"residual", format_double(r.residual)}};
    if (cfg.output.checkpoint == "csv" || cfg.output.checkpoint == "both")
      write_checkpoint(out_path(cfg, "checkpoint_" + tag + ".csv"), r.config, CheckpointFormat::csv, meta);
    if (cfg.output.checkpoint == "binary" || cfg.output.checkpoint == "both")
      write_checkpoint(out_path(cfg, "checkpoint_" + tag + ".bin"), r.config, CheckpointFormat::binary);
    auto trace = trace_table(r.trace);
    trace.add_meta("replica", std::to_string(k));
    write_csv(out_path(cfg, "trace_" + tag + ".csv"), trace);
    reps.push_back({{"replica", k},
                    {"seed", cfg.run.seed + k},
                    {"energy", r.energy},
                    {"residual", r.residual},
                    {"converged", r.converged},
                    {"descent_iterations", r.descent_iterations}});
  }
  summary["replicas"] = reps;
  summary["unconverged"] = res.unconverged;
  write_text(out_path(cfg, "simulation.json"), summary.dump(2) + "\n");
  write_text(out_path(cfg, "config.json"), serialize_scenario(cfg));
  return res;
}

void run_predict(const ScenarioConfig& cfg, const Logger& log) {
  const GasSpec spec = cfg.gas.build();
  const auto P = predict(spec);
  json meta;
  meta["scenario"] = cfg.name;
  switch (P.kind) {
    case Prediction::Kind::shells: {
      say(log, "prediction: shell layout");
      write_csv(out_path(cfg, "shells.csv"), shell_table(*P.shells));
      write_csv(out_path(cfg, "profile.csv"), profile_table(profile_from_shells(spec, *P.shells)));
      meta["kind"] = "shells";
      json shells = json::array();
      for (const auto& s : P.shells->shells)
        shells.push_back({{"charge", s.charge},
                          {"fraction", s.fraction},
                          {"inner_radius", s.inner_radius},
                          {"outer_radius", s.outer_radius},
                          {"density", s.density}});
      meta["shells"] = shells;
      break;
    }
    case Prediction::Kind::profile: {
      say(log, "prediction: radial profile");
      write_csv(out_path(cfg, "profile.csv"), profile_table(*P.profile));
      meta["kind"] = "profile";
      meta["support_radius"] = P.profile->support_radius;
      meta["order"] = to_string(P.profile->order);
      meta["mean_charge"] = P.profile->mean_charge;
      break;
    }
    case Prediction::Kind::partial: {
      say(log, "prediction: partial (non-monotone weight)");
      CsvTable t;
      t.columns = {"gamma", "charge"};
      for (const auto& l : P.partial->level_sets)
        for (double q : l.charges) t.rows.push_back({l.gamma, q});
      write_csv(out_path(cfg, "level_sets.csv"), t);
      meta["kind"] = "partial";
      meta["multi_valued"] = P.partial->multi_valued;
      break;
    }
  }
  if (wants_format(cfg, "json")) write_text(out_path(cfg, "prediction.json"), meta.dump(2) + "\n");
}

void run_inverse(const ScenarioConfig& cfg, const Logger& log) {
  const InverseConfig ic = cfg.inverse.value_or(InverseConfig{});
  const auto f = target_of(ic);
  GasConfig gc = cfg.gas;
  const GasSpec probe = [&] {
    // The charge law is replaced by the reconstruction; only g and d matter here.
    GasConfig tmp = gc;
    tmp.charges = "uniform";
    tmp.charge_min = 1;
    tmp.charge_max = 2;
    return tmp.build();
  }();
  const auto& w = probe.weight();
  const int d = cfg.gas.dimension;
  say(log, "reconstructing nu for target " + ic.target);
  const auto curve = integrate_unstable_manifold(f, w, d);
  const auto rec = reconstruct_charge_density(curve, f, w);
  const double pf = pushforward_error(rec, f, w, d, ic.fraction);
  CsvTable nu;
  nu.add_meta("target", ic.target);
  nu.add_meta("q_min", rec.q_min);
  nu.add_meta("q_max", rec.q_max);
  nu.columns = {"q", "nu"};
  for (std::size_t k = 0; k < rec.q.size(); ++k) nu.rows.push_back({rec.q[k], rec.nu[k]});
  write_csv(out_path(cfg, "nu.csv"), nu);
  CsvTable cv;
  cv.columns = {"q", "r", "mass"};
  for (std::size_t k = 0; k < curve.q.size(); ++k) cv.rows.push_back({curve.q[k], curve.r[k], curve.mass[k]});
  write_csv(out_path(cfg, "manifold_curve.csv"), cv);
  json meta;
  meta["target"] = ic.target;
  meta["weight"] = cfg.gas.weight;
  meta["dimension"] = d;
  meta["saddle_charge"] = curve.saddle_q;
  meta["q_min"] = rec.q_min;
  meta["q_max"] = rec.q_max;
  meta["mass_before_normalization"] = rec.mass_before_normalization;
  meta["terminal_radius"] = curve.terminal_radius;
  meta["eigenvalues"] = {curve.stable_eigenvalue, curve.unstable_eigenvalue};
  meta["pushforward_sup_error"] = pf;
  meta["curve_samples"] = curve.q.size();
  if (ic.roundtrip) {
    say(log, "roundtrip: " + std::to_string(cfg.run.replicas) + " replica(s) of N=" + std::to_string(cfg.run.n));
    GasParams base = probe.params();
    const auto rep = verify_roundtrip(f, w, base, cfg.run.n, cfg.run.replicas, cfg.run.seed, cfg.run.schedule,
                                      cfg.run.threads, ic.bins, ic.fraction);
    CsvTable t;
    t.add_meta("rms_relative", rep.rms_relative);
    t.add_meta("sup_relative", rep.sup_relative);
    t.add_meta("replicas", std::to_string(rep.replicas));
    t.columns = {"r", "empirical", "se", "target"};
    for (std::size_t k = 0; k < rep.r.size(); ++k) t.rows.push_back({rep.r[k], rep.empirical[k], rep.se[k], rep.target[k]});
    write_csv(out_path(cfg, "roundtrip.csv"), t);
    meta["roundtrip"] = {{"n", rep.n},
                         {"replicas", rep.replicas},
                         {"rms_relative", rep.rms_relative},
                         {"sup_relative", rep.sup_relative},
                         {"ordering_mean", rep.ordering_mean},
                         {"unconverged", rep.unconverged}};
  }
  write_text(out_path(cfg, "inverse.json"), meta.dump(2) + "\n");
}

void run_stats(const ScenarioConfig& cfg, const std::vector<Configuration>& configs, const Logger& log) {
  if (configs.empty()) throw Error(Errc::insufficient_statistics, "no configurations to analyse");
  const GasSpec spec = cfg.gas.build();
  for (const auto& c : configs) c.validate(spec);
  const double R = radius_estimate(spec);
  json meta;
  meta["scenario"] = cfg.name;
  meta["replicas"] = configs.size();
  if (wants(cfg, "radial") && !spec.manifold()) {
    say(log, "stats: radial profiles");
    write_csv(out_path(cfg, "radial.csv"), radial_table(radial_profiles(configs, cfg.analysis.bins)));
  }
  if (wants(cfg, "ordering")) {
    say(log, "stats: ordering metric");
    CsvTable t;
    t.columns = {"replica", "metric"};
    double sum = 0;
    bool defined = true;
    for (std::size_t k = 0; k < configs.size(); ++k) {
      try {
        const double m = ordering_of(configs[k], spec);
        t.rows.push_back({static_cast<double>(k), m});
        sum += m;
      } catch (const Error& e) {
        if (e.code() != Errc::undefined_metric) throw;
        defined = false;
      }
    }
    if (defined) {
      const double mean = sum / static_cast<double>(configs.size());
      t.add_meta("mean", mean);
      meta["ordering_mean"] = mean;
    } else {
      t.add_meta("mean", "undefined");
      meta["ordering_mean"] = nullptr;
    }
    write_csv(out_path(cfg, "ordering.csv"), t);
  }
  if (wants(cfg, "nearest_neighbor")) {
    say(log, "stats: nearest-neighbour distances");
    std::vector<double> d;
    for (const auto& c : configs) {
      const auto nn = nearest_neighbor_distances(c, true);
      d.insert(d.end(), nn.begin(), nn.end());
    }
    const double hi = *std::max_element(d.begin(), d.end()) * 1.05;
    const auto h = histogram(d, cfg.analysis.nn_bins, 0, hi);
    auto t = histogram_table(h, "distance");
    const auto peaks = histogram_peaks(h);
    std::string list;
    for (double p : peaks) list += (list.empty() ? "" : ";") + format_double(p);
    t.add_meta("peaks", list);
    write_csv(out_path(cfg, "nearest_neighbor.csv"), t);
    meta["nearest_neighbor_peaks"] = peaks;
  }
  if (wants(cfg, "correlation") && !spec.manifold()) {
    std::vector<double> edges;
    for (std::size_t b = 0; b <= cfg.analysis.correlation_bins; ++b)
      edges.push_back(cfg.analysis.correlation_max * static_cast<double>(b) / cfg.analysis.correlation_bins);
    json peaks = json::array();
    for (double frac : cfg.analysis.r0) {
      say(log, "stats: pair correlation at r0=" + fixed(frac, 2) + "R");
      const auto G = local_pair_correlation(configs, frac * R, cfg.analysis.correlation_width * R, edges);
      auto t = correlation_table(G);
      t.add_meta("r0_fraction", frac);
      double peak = NAN;
      try {
        peak = first_peak(G);
      } catch (const Error&) {
      }
      t.add_meta("first_peak", peak);
      write_csv(out_path(cfg, "correlation_r0_" + fixed(frac, 2) + ".csv"), t);
      peaks.push_back({{"r0_fraction", frac}, {"first_peak", std::isnan(peak) ? json(nullptr) : json(peak)}});
    }
    meta["correlation_first_peaks"] = peaks;
  }
  if (wants_format(cfg, "json")) write_text(out_path(cfg, "stats.json"), meta.dump(2) + "\n");
}

void run_splitting(const ScenarioConfig& cfg, const std::vector<Configuration>& configs, const Logger& log) {
  const GasSpec spec = cfg.gas.build();
  const auto profile = predicted_profile(spec);
  json all = json::array();
  for (std::size_t k = 0; k < configs.size(); ++k) {
    say(log, "splitting: replica " + std::to_string(k));
    const auto s = splitting_terms(configs[k], profile, spec);
    all.push_back(json::parse(to_json(s)));
  }
  write_text(out_path(cfg, "splitting.json"), all.dump(2) + "\n");
}

void run_scenario(const ScenarioConfig& cfg, const Logger& log) {
  say(log, "scenario " + cfg.name + ": " + cfg.description);
  if (cfg.inverse) {
    run_inverse(cfg, log);
    return;
  }
  const auto sim = run_simulate(cfg, log);
  std::vector<Configuration> configs;
  for (const auto& r : sim.runs) configs.push_back(r.config);
  run_stats(cfg, configs, log);
  if (!cfg.gas.manifold.empty()) {
    say(log, "no analytic prediction on manifolds");
  } else {
    try {
      run_predict(cfg, log);
    } catch (const Error& e) {
      if (e.code() != Errc::wrong_regime) throw;
      say(log, std::string("no analytic prediction: ") + e.what());
    }
  }
  if (wants(cfg, "splitting")) run_splitting(cfg, configs, log);
  if (sim.unconverged)
    throw Error(Errc::convergence, std::to_string(sim.unconverged) + " replica(s) did not reach the residual threshold");
}

}  // namespace hgas
