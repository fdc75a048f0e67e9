#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "hgas/error.hpp"
#include "hgas/io.hpp"
#include "hgas/pipeline.hpp"
#include "hgas/scenario.hpp"

namespace {

struct Common {
  std::string config, preset, out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::vector<std::string> overrides;
  std::vector<std::string> inputs;
  bool quiet = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "scenario JSON file");
  app->add_option("--preset", c.preset, "named preset (see `hgas scenario --list`)");
  app->add_option("--seed", c.seed, "base seed; replica k uses seed + k");
  app->add_option("--threads", c.threads, "replica threads (1 is fully deterministic)");
  app->add_option("--out", c.out, "output directory");
  app->add_option("--override", c.overrides, "dotted key=value, repeatable (e.g. run.n=500)");
  app->add_flag("-q,--quiet", c.quiet, "no progress messages");
}

std::string escape(std::string s) {
  std::string out;
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    if (ch == '\n') {
      out += "\\n";
      continue;
    }
    out += ch;
  }
  return out;
}

int report(std::string_view code, const std::string& detail, int exit_code) {
  std::cerr << "hgas: error=" << code << " detail=\"" << escape(detail) << "\"\n";
  return exit_code;
}

int exit_code_of(hgas::Errc e) {
  switch (e) {
    case hgas::Errc::convergence:
      return 3;
    case hgas::Errc::insufficient_statistics:
      return 4;
    default:
      return 2;
  }
}

hgas::ScenarioConfig resolve(const Common& c) {
  if (!c.config.empty() && !c.preset.empty()) throw hgas::Error(hgas::Errc::config, "give --config or --preset, not both");
  if (c.config.empty() && c.preset.empty()) throw hgas::Error(hgas::Errc::config, "one of --config or --preset is required");
  std::string text = c.config.empty() ? hgas::serialize_scenario(hgas::preset(c.preset)) : hgas::read_text(c.config);
  std::vector<std::string> ov = c.overrides;
  if (c.seed) ov.push_back("run.seed=" + std::to_string(*c.seed));
  if (c.threads) ov.push_back("run.threads=" + std::to_string(*c.threads));
  if (!c.out.empty()) ov.push_back("output.directory=\"" + escape(c.out) + "\"");
  if (!ov.empty()) text = hgas::apply_overrides(text, ov);
  return hgas::parse_scenario(text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heterogeneous Coulomb and Riesz gases: simulation, prediction, inverse design and statistics"};
  app.require_subcommand(1);
  Common common;
  std::string scenario_name;
  bool list = false, print_config = false;

  auto* sim = app.add_subcommand("simulate", "minimize replicas; writes checkpoints, traces and simulation.json");
  auto* pred = app.add_subcommand("predict", "analytic equilibrium: profile.csv, shells.csv or level_sets.csv");
  auto* inv = app.add_subcommand("inverse", "reconstruct nu from a target density; nu.csv, inverse.json");
  auto* st = app.add_subcommand("stats", "observables from checkpoints (--input files or the output directory)");
  auto* sp = app.add_subcommand("splitting", "splitting-formula terms of checkpoints; splitting.json");
  auto* sc = app.add_subcommand("scenario", "run a preset end to end");
  for (auto* s : {sim, pred, inv, st, sp, sc}) add_common(s, common);
  for (auto* s : {st, sp}) s->add_option("--input", common.inputs, "checkpoint files (default: output directory)");
  sc->add_option("name", scenario_name, "preset name");
  sc->add_flag("--list", list, "list presets and exit");
  sc->add_flag("--print-config", print_config, "print the resolved configuration and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report("config", e.what(), 2);
  }

  hgas::Logger log;
  if (!common.quiet) log = [](const std::string& m) { std::cerr << "hgas: " << m << '\n'; };

  try {
    if (sc->parsed()) {
      if (list) {
        for (const auto& n : hgas::preset_names()) {
          const auto p = hgas::preset(n);
          std::cout << n << "  " << p.description << '\n';
        }
        return 0;
      }
      if (!scenario_name.empty()) {
        if (!common.preset.empty() && common.preset != scenario_name)
          throw hgas::Error(hgas::Errc::config, "scenario name and --preset disagree");
        common.preset = scenario_name;
      }
    }
    const auto cfg = resolve(common);
    if (print_config) {
      std::cout << hgas::serialize_scenario(cfg);
      return 0;
    }
    auto inputs = [&] {
      if (common.inputs.empty()) return hgas::load_checkpoints(cfg.output.directory);
      std::vector<hgas::Configuration> out;
      for (const auto& f : common.inputs) out.push_back(hgas::read_checkpoint(f));
      return out;
    };
    if (sim->parsed()) {
      const auto res = hgas::run_simulate(cfg, log);
      if (res.unconverged)
        return report("convergence", std::to_string(res.unconverged) + " replica(s) did not reach the residual threshold", 3);
    } else if (pred->parsed()) {
      hgas::run_predict(cfg, log);
    } else if (inv->parsed()) {
      hgas::run_inverse(cfg, log);
    } else if (st->parsed()) {
      hgas::run_stats(cfg, inputs(), log);
    } else if (sp->parsed()) {
      hgas::run_splitting(cfg, inputs(), log);
    } else if (sc->parsed()) {
      hgas::run_scenario(cfg, log);
    }
  } catch (const hgas::Error& e) {
    return report(hgas::to_string(e.code()), e.what(), exit_code_of(e.code()));
  } catch (const std::exception& e) {
    return report("internal", e.what(), 1);
  }
  return 0;
}
