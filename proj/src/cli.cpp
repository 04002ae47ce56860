#include "blackstock/cli.hpp"

#include "blackstock/errors.hpp"
#include "blackstock/io.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace blackstock {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path output_dir(const RunConfig& cfg, const RunOptions& options) {
  fs::path dir = options.output.value_or(cfg.output_dir);
  fs::create_directories(dir);
  return dir;
}

GammaWeights resolve_gammas(const RunConfig& cfg) {
  if (!cfg.calibrate_gammas) return cfg.gammas;
  try {
    return calibrate_gammas(cfg.medium, cfg.grid, cfg.gammas);
  } catch (const std::runtime_error& e) {
    throw PreconditionError(e.what());
  }
}

json medium_json(const MediumParams& p) { return {{"c", p.c}, {"b", p.b}, {"k", p.k}, {"sigma", p.sigma}}; }

// Runs the configured simulation and writes series.csv, summary.json and checkpoint.bin.
TimeSeries simulate_into(const RunConfig& cfg, const fs::path& dir) {
  const GammaWeights gammas = resolve_gammas(cfg);
  SimulateOptions opts;
  opts.gammas = gammas;
  opts.checkpoint_every = cfg.integrator.checkpoint_every;
  const fs::path cp_path = dir / "checkpoint.bin";
  opts.on_checkpoint = [&](const Checkpoint& cp) { save_checkpoint(cp_path, cp); };

  const auto& ic = cfg.integrator;
  TimeSeries series;
  if (cfg.resume_from) {
    const Checkpoint cp = load_checkpoint(*cfg.resume_from);
    if (!(cp.state.grid() == cfg.grid)) throw ConfigError("resume_from: checkpoint grid differs from the config grid");
    if (!(ic.final_time > cp.state.time)) throw ConfigError("resume_from: T must exceed the checkpoint time");
    series = simulate_from(cp, ic.final_time, ic.step, cfg.medium, ic.sample_every, opts);
  } else {
    series = simulate(build_initial(cfg.psi0, cfg.psi1, cfg.grid), ic.final_time, ic.step, cfg.medium,
                      ic.sample_every, opts);
  }

  write_series_csv(dir / "series.csv", series);
  json summary = summary_json(series);
  summary["scheme"] = to_string(ic.step.scheme);
  summary["dt"] = ic.step.dt;
  summary["T"] = ic.final_time;
  summary["medium"] = medium_json(cfg.medium);
  summary["gammas"] = {{"gamma1", gammas.gamma1}, {"gamma2", gammas.gamma2}, {"gamma3", gammas.gamma3}};
  write_json(dir / "summary.json", summary);
  if (series.last_checkpoint) save_checkpoint(cp_path, *series.last_checkpoint);
  return series;
}

int cmd_simulate(const RunConfig& cfg, const RunOptions& options, std::ostream& out) {
  const fs::path dir = output_dir(cfg, options);
  const TimeSeries series = simulate_into(cfg, dir);
  if (!options.quiet) {
    if (series.completed()) {
      out << fmt::format("simulate: completed at t = {:.6g}, E = {:.6e}\n", series.termination_time,
                         series.samples.back().E);
    } else {
      out << fmt::format("simulate: {} at t = {:.6g} ({})\n", to_string(series.termination),
                         series.termination_time, series.message);
    }
  }
  return series.completed() ? kExitOk : kExitDiverged;
}

int cmd_fit(const RunConfig& cfg, const RunOptions& options, std::ostream& out) {
  const fs::path dir = output_dir(cfg, options);
  TimeSeries series;
  json source;
  if (cfg.fit.series.empty()) {
    series = simulate_into(cfg, dir);
    source = (dir / "series.csv").string();
  } else {
    try {
      series = read_series_csv(cfg.fit.series);
    } catch (const std::runtime_error& e) {
      throw PreconditionError(e.what());
    }
    source = cfg.fit.series.string();
  }
  const DecayFit fit = cfg.fit.window ? fit_decay(series, *cfg.fit.window) : fit_decay(series);
  json doc = to_json(fit);
  doc["series"] = source;
  write_json(dir / "fit.json", doc);
  if (!options.quiet) {
    out << fmt::format("fit: zeta = {:.6g}, r^2 = {:.6f}, {}\n", fit.zeta, fit.r_squared,
                       to_string(fit.classification));
  }
  return kExitOk;
}

int cmd_threshold(const RunConfig& cfg, const RunOptions& options, std::ostream& out) {
  const fs::path dir = output_dir(cfg, options);
  const auto& t = cfg.threshold;
  const ThresholdReport report =
      threshold_bisection(cfg.medium, cfg.grid, cfg.psi0, cfg.psi1, t.lo, t.hi, t.iters, t.probe);
  write_json(dir / "threshold.json", to_json(report));
  if (!options.quiet) {
    out << fmt::format("threshold: delta* = {:.6g} in [{:.6g}, {:.6g}]\n", report.delta_star, report.amplitude_lo,
                       report.amplitude_hi);
  }
  return kExitOk;
}

int cmd_weighted_study(const RunConfig& cfg, const RunOptions& options, std::ostream& out) {
  const fs::path dir = output_dir(cfg, options);
  const RegularityStudy study = weighted_regularity_study(cfg.medium, cfg.weighted_study, cfg.grid.extents());
  json doc = to_json(study);
  doc["scheme"] = to_string(cfg.weighted_study.scheme);
  doc["T"] = cfg.weighted_study.final_time;
  doc["dt"] = cfg.weighted_study.dt;
  write_json(dir / "weighted_study.json", doc);
  if (!options.quiet) {
    out << fmt::format("weighted-study: unweighted growth {:.4g}, weighted ratio {:.4g}, {}\n",
                       study.unweighted_growth, study.weighted_ratio, study.passes ? "pass" : "fail");
  }
  return kExitOk;
}

int cmd_verify_inequalities(const RunConfig& cfg, const RunOptions& options, std::ostream& out) {
  const fs::path dir = output_dir(cfg, options);
  const json report = inequality_report(cfg.inequalities, cfg.seed);
  write_json(dir / "inequalities.json", report);
  if (!options.quiet) {
    out << fmt::format("verify-inequalities: {}\n", report["pass"].get<bool>() ? "pass" : "fail");
  }
  return kExitOk;
}

struct SweepRun {
  std::size_t index = 0;
  json values;
  int exit_code = kExitOk;
  std::string error;
};

int cmd_sweep(const RunConfig& cfg, const RunOptions& options, std::ostream& out, std::ostream& err) {
  if (cfg.sweep.empty()) throw ConfigError("sweep: no parameters given");
  const fs::path dir = output_dir(cfg, options);
  std::size_t total = 1;
  for (const auto& axis : cfg.sweep) total *= axis.values.size();

  std::vector<SweepRun> runs(total);
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      SweepRun& r = runs[i];
      r.index = i;
      json doc = cfg.document;
      doc.erase("sweep");
      std::size_t rest = i;
      // Last axis varies fastest.
      std::vector<std::size_t> pick(cfg.sweep.size());
      for (std::size_t a = cfg.sweep.size(); a-- > 0;) {
        pick[a] = rest % cfg.sweep[a].values.size();
        rest /= cfg.sweep[a].values.size();
      }
      for (std::size_t a = 0; a < cfg.sweep.size(); ++a) {
        const json& value = cfg.sweep[a].values[pick[a]];
        r.values[cfg.sweep[a].pointer] = value;
        doc[json::json_pointer(cfg.sweep[a].pointer)] = value;
      }
      const fs::path run_dir = dir / fmt::format("run_{:04d}", i);
      doc["output_dir"] = run_dir.string();
      std::ostringstream run_out, run_err;
      try {
        RunConfig sub = parse_config(doc);
        sub.seed = cfg.seed;
        fs::create_directories(run_dir);
        write_json(run_dir / "config.json", doc);
        r.exit_code = run("simulate", sub, RunOptions{run_dir, 1, true}, run_out, run_err);
      } catch (const ConfigError& e) {
        r.exit_code = kExitConfig;
        run_err << "error: " << e.what() << '\n';
      }
      r.error = run_err.str();
      if (!r.error.empty()) {
        std::lock_guard lock(err_mutex);
        err << fmt::format("run_{:04d}: {}", i, r.error);
      }
    }
  };

  int jobs = options.jobs > 0 ? options.jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  jobs = static_cast<int>(std::min<std::size_t>(jobs, total));
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  json index = json::array();
  int worst = kExitOk;
  std::size_t completed = 0;
  for (const auto& r : runs) {
    index.push_back({{"run", fmt::format("run_{:04d}", r.index)}, {"values", r.values}, {"exit_code", r.exit_code}});
    if (r.exit_code == kExitOk) ++completed;
    if (r.exit_code == kExitConfig) worst = kExitConfig;
  }
  write_json(dir / "sweep.json", {{"runs", index}});
  if (!options.quiet) out << fmt::format("sweep: {} of {} runs completed\n", completed, total);
  return worst;
}

}  // namespace

json inequality_report(const InequalitySettings& settings, std::uint64_t seed) {
  bool pass = true;
  json ratios = json::array();
  for (int d : settings.dims) {
    const Grid grid = Grid::cube(d, std::max(settings.max_mode, kMinModes));
    for (RatioKind kind : {RatioKind::agmon, RatioKind::interpolation3, RatioKind::interpolation4}) {
      const std::uint64_t s = seed + 1000 * static_cast<std::uint64_t>(d) + static_cast<std::uint64_t>(kind);
      const EmpiricalConstant c = empirical_constant(kind, grid, settings.max_mode, settings.samples, s);
      const std::size_t violations = scale_invariance_violations(kind, grid, settings.max_mode, settings.scale_samples, s);
      json entry = to_json(c);
      entry["dim"] = d;
      entry["max_mode"] = settings.max_mode;
      entry["scale_samples"] = settings.scale_samples;
      entry["scale_violations"] = violations;
      pass = pass && c.stable && violations == 0;
      ratios.push_back(entry);
    }
  }

  auto gronwall_entry = [&](const GronwallParams& g) {
    const GronwallResult r = gronwall_verify(g, settings.gronwall_horizon, settings.gronwall_dt);
    return json{{"params", to_json(g)},
                {"smallness", g.smallness()},
                {"bound_coefficient", r.coefficient},
                {"ok", r.ok},
                {"max_excess", r.max_excess},
                {"first_violation", r.first_violation},
                {"corrected_coefficient", r.corrected_coefficient},
                {"corrected_ok", r.corrected_ok}};
  };
  const json worked = gronwall_entry(GronwallParams{});
  GronwallParams linear;
  linear.c2 = 0.0;
  const json linear_case = gronwall_entry(linear);

  std::mt19937_64 rng(seed);
  int ok = 0, corrected_ok = 0;
  json failures = json::array();
  for (int i = 0; i < settings.gronwall_draws; ++i) {
    const GronwallParams g = random_admissible_gronwall(rng);
    const json e = gronwall_entry(g);
    if (e["ok"].get<bool>()) {
      ++ok;
    } else if (failures.size() < 5) {
      failures.push_back(e);
    }
    if (e["corrected_ok"].get<bool>()) ++corrected_ok;
  }
  const bool gronwall_pass =
      worked["ok"].get<bool>() && linear_case["ok"].get<bool>() && ok == settings.gronwall_draws;
  pass = pass && gronwall_pass;

  return {{"seed", seed},
          {"ratios", ratios},
          {"gronwall",
           {{"worked_case", worked},
            {"linear_case", linear_case},
            {"draws", settings.gronwall_draws},
            {"ok", ok},
            {"corrected_ok", corrected_ok},
            {"failures", failures},
            {"pass", gronwall_pass}}},
          {"pass", pass}};
}

int run(std::string_view subcommand, const RunConfig& cfg, const RunOptions& options, std::ostream& out,
        std::ostream& err) {
  try {
    if (subcommand == "simulate") return cmd_simulate(cfg, options, out);
    if (subcommand == "fit") return cmd_fit(cfg, options, out);
    if (subcommand == "threshold") return cmd_threshold(cfg, options, out);
    if (subcommand == "weighted-study") return cmd_weighted_study(cfg, options, out);
    if (subcommand == "verify-inequalities") return cmd_verify_inequalities(cfg, options, out);
    if (subcommand == "sweep") return cmd_sweep(cfg, options, out, err);
    err << "error: unknown subcommand '" << subcommand << "'\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const PreconditionError& e) {
    err << "precondition failed: " << e.what() << '\n';
    return kExitPrecondition;
  } catch (const PicardFailure& e) {
    err << "picard failure: " << e.what() << '\n';
    return kExitDiverged;
  } catch (const DivergenceError& e) {
    err << "diverged: " << e.what() << '\n';
    return kExitDiverged;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Spectral solver and experiments for the Blackstock equation"};
  app.require_subcommand(1);
  std::string config_path;
  std::string output;
  int jobs = 0;
  const char* names[] = {"simulate", "fit", "threshold", "weighted-study", "verify-inequalities", "sweep"};
  const char* help[] = {"run one simulation, write series.csv, summary.json, checkpoint.bin",
                        "fit the exponential decay rate of a series",
                        "bisect the small-data amplitude threshold",
                        "time-weighted regularity refinement study",
                        "empirical interpolation constants and Gronwall checks",
                        "simulate every parameter tuple of the sweep section"};
  for (std::size_t i = 0; i < std::size(names); ++i) {
    auto* sub = app.add_subcommand(names[i], help[i]);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--output", output, "output directory (overrides output_dir)");
    sub->add_option("--jobs", jobs, "sweep worker count (default: hardware threads)")->check(CLI::NonNegativeNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  const std::string subcommand = app.get_subcommands().front()->get_name();

  RunConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  RunOptions options;
  if (!output.empty()) options.output = output;
  options.jobs = jobs;
  return run(subcommand, cfg, options, std::cout, std::cerr);
}

}  // namespace blackstock
