#pragma once

// Command dispatch for the `lymphnet` tool.
//
//   analyze  --mass M --exponent a      one analytic breakdown
//   sweep    --config F                 masses x exponents table
//   simulate --config F --trials N      seeded simulations + summary row
//   scenario --profile P --config F     bandwidth-scenario verdicts
//
// Exit status: 0 success, 1 usage or configuration error, 2 infeasible
// parameters.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "csv.hpp"
#include "scaling.hpp"
#include "scenario.hpp"
#include "sim.hpp"

namespace lymphnet {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInfeasible = 2;

namespace detail {

inline RunConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

inline void emit_rows(const std::vector<CsvRow>& rows, const std::string& path, std::ostream& out) {
  if (path.empty()) write_csv(rows, out);
  else write_csv(rows, path);
}

inline CsvRow analytic_row(double mass, double a, DetectionMode mode, const TimingBreakdown& t,
                           std::uint64_t seed) {
  return {mass, a, std::string(model_label(a)), std::string(to_string(mode)), t, seed, 0};
}

inline std::vector<CsvRow> run_sweep(const RunConfig& cfg) {
  const auto exps = cfg.exponent_list();
  std::vector<CsvRow> rows;
  for (const auto& r : sweep(cfg.masses, exps, cfg.arch, cfg.params, cfg.mode))
    rows.push_back(analytic_row(r.mass, r.exponent, cfg.mode, r.timing, cfg.seed));
  return rows;
}

struct SimulateOutput {
  std::vector<CsvRow> rows;
  EventLog events;
};

/// Runs `cfg.trials` seeded simulations per mass. The event log is kept for
/// trial `events_trial` of the first mass.
inline SimulateOutput run_simulations(const RunConfig& cfg, std::int64_t events_trial) {
  if (cfg.mode != DetectionMode::spatial)
    throw UsageError("simulate models detector travel; set mode = spatial");
  SimulateOutput out;
  const auto label = std::string(model_label(cfg.arch.exponent));
  for (std::size_t mi = 0; mi < cfg.masses.size(); ++mi) {
    const double mass = cfg.masses[mi];
    TimingBreakdown sum;
    for (std::int64_t trial = 0; trial < cfg.trials; ++trial) {
      SimConfig sc;
      sc.mass = mass;
      sc.arch = cfg.arch;
      sc.params = cfg.params;
      sc.seed = trial_seed(cfg.seed, static_cast<std::uint64_t>(trial));
      sc.movement = cfg.movement;
      sc.detectors = static_cast<std::size_t>(cfg.detectors);
      sc.site = cfg.infection_site;
      sc.walk.step_fraction = cfg.walk_step_fraction;
      auto res = simulate(sc);
      out.rows.push_back({mass, cfg.arch.exponent, label, "spatial", res.timing, sc.seed, trial});
      sum.t_detect += res.timing.t_detect;
      sum.t_recruit += res.timing.t_recruit;
      sum.t_expand += res.timing.t_expand;
      if (mi == 0 && trial == events_trial) out.events = std::move(res.log);
    }
    const double n = static_cast<double>(cfg.trials);
    out.rows.push_back({mass, cfg.arch.exponent, label, "spatial",
                        TimingBreakdown::from_phases(sum.t_detect / n, sum.t_recruit / n,
                                                     sum.t_expand / n),
                        cfg.seed, -1});
  }
  return out;
}

inline std::string format_verdict(const ScenarioVerdict& v) {
  std::ostringstream os;
  os << "profile,M,winner,a_model3,t_model1,t_model2,t_model3\n";
  for (const auto& p : v.points)
    os << v.profile.name() << ',' << format_sig9(p.mass) << ',' << to_string(p.winner) << ','
       << format_sig9(p.model3_exponent) << ',' << format_sig9(p.timings[0].t_total) << ','
       << format_sig9(p.timings[1].t_total) << ',' << format_sig9(p.timings[2].t_total) << '\n';
  os << v.profile.name() << ",overall," << to_string(v.overall) << ",,,,\n";
  return os.str();
}

inline std::vector<CsvRow> verdict_rows(const ScenarioVerdict& v, std::uint64_t seed) {
  std::vector<CsvRow> rows;
  for (const auto& p : v.points) {
    const double exps[3] = {1.0, 0.0, p.model3_exponent};
    const char* names[3] = {"model1", "model2", "model3"};
    for (int i = 0; i < 3; ++i)
      rows.push_back({p.mass, exps[i], names[i], "contention", p.timings[static_cast<std::size_t>(i)],
                      seed, 0});
  }
  return rows;
}

inline void write_text(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << text;
}

} // namespace detail

inline int dispatch(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  CLI::App app{"Hierarchical detection network scaling: analysis, sweeps, simulation"};
  app.name("lymphnet");
  app.require_subcommand(1);

  std::string config_path, output_path, mode_name, profile_name, events_path, breakdowns_path;
  std::optional<double> mass, exponent;
  std::optional<std::int64_t> trials;
  std::optional<std::uint64_t> seed;
  std::int64_t events_trial = 0;

  auto* analyze = app.add_subcommand("analyze", "Print one analytic timing breakdown");
  analyze->add_option("--mass", mass, "System mass M (> 0)")->required();
  analyze->add_option("--exponent", exponent, "Scaling exponent a in [0, 1]")->required();
  analyze->add_option("--config", config_path, "Configuration file");
  analyze->add_option("--mode", mode_name, "spatial | contention");

  auto* sweep_cmd = app.add_subcommand("sweep", "Write the masses x exponents CSV");
  sweep_cmd->add_option("--config", config_path, "Configuration file");
  sweep_cmd->add_option("--output", output_path, "CSV path (default: stdout)");
  sweep_cmd->add_option("--mode", mode_name, "spatial | contention");

  auto* sim_cmd = app.add_subcommand("simulate", "Run seeded discrete-event simulations");
  sim_cmd->add_option("--config", config_path, "Configuration file");
  sim_cmd->add_option("--trials", trials, "Trials per mass")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--mass", mass, "Simulate this single mass");
  sim_cmd->add_option("--exponent", exponent, "Override the config exponent");
  sim_cmd->add_option("--output", output_path, "CSV path (default: stdout)");
  sim_cmd->add_option("--events", events_path, "Write the event log of one trial here");
  sim_cmd->add_option("--events-trial", events_trial, "Trial whose events are written")
      ->check(CLI::NonNegativeNumber);

  auto* scen_cmd = app.add_subcommand("scenario", "Rank architectures under bandwidth limits");
  scen_cmd->add_option("--profile", profile_name,
                       "unlimited-unlimited | limited-unlimited | unlimited-limited | "
                       "limited-limited | all")
      ->required();
  scen_cmd->add_option("--config", config_path, "Configuration file");
  scen_cmd->add_option("--output", output_path, "Verdict table path (default: stdout)");
  scen_cmd->add_option("--breakdowns", breakdowns_path, "Per-model breakdown CSV path");

  for (auto* sub : {analyze, sweep_cmd, sim_cmd, scen_cmd})
    sub->add_option("--seed", seed, "Override the config seed");

  if (argc <= 1) {
    err << app.help();
    return kExitUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    RunConfig cfg = detail::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (!mode_name.empty()) cfg.mode = parse_detection_mode(mode_name);
    if (!output_path.empty()) cfg.output = output_path;
    cfg.params.validate();
    cfg.arch.validate();

    if (analyze->parsed()) {
      if (!(*exponent >= 0.0 && *exponent <= 1.0))
        throw UsageError("--exponent must lie in [0, 1]");
      const auto t = total_response_time(*mass, cfg.arch.with_exponent(*exponent), cfg.params,
                                         cfg.mode);
      const std::vector<CsvRow> rows{detail::analytic_row(*mass, *exponent, cfg.mode, t, cfg.seed)};
      write_csv(rows, out);
    } else if (sweep_cmd->parsed()) {
      detail::emit_rows(detail::run_sweep(cfg), cfg.output, out);
    } else if (sim_cmd->parsed()) {
      if (trials) cfg.trials = *trials;
      if (mass) {
        if (!(*mass > 0.0)) throw UsageError("--mass must be > 0");
        cfg.masses = {*mass};
      }
      if (exponent) {
        if (!(*exponent >= 0.0 && *exponent <= 1.0))
          throw UsageError("--exponent must lie in [0, 1]");
        cfg.arch.exponent = *exponent;
      }
      if (!events_path.empty() && events_trial >= cfg.trials)
        throw UsageError("--events-trial must be below the trial count");
      const auto res = detail::run_simulations(cfg, events_trial);
      detail::emit_rows(res.rows, cfg.output, out);
      if (!events_path.empty()) {
        std::ostringstream os;
        res.events.write(os);
        detail::write_text(os.str(), events_path, out);
      }
    } else if (scen_cmd->parsed()) {
      ScenarioOptions opts;
      opts.model3_exponent = cfg.model3_exponent;
      opts.grid_resolution = cfg.grid_resolution;
      if (profile_name == "all") {
        std::ostringstream os;
        os << "profile,winner\n";
        for (const auto& row : scenario_table(cfg.masses, cfg.arch, cfg.params, cfg.limited_rho,
                                              cfg.limited_lambda, opts))
          os << row.profile.name() << ',' << to_string(row.winner) << '\n';
        detail::write_text(os.str(), cfg.output, out);
      } else {
        const auto profile = parse_profile(profile_name, cfg.limited_rho, cfg.limited_lambda);
        const auto verdict = evaluate_scenario(profile, cfg.masses, cfg.arch, cfg.params, opts);
        detail::write_text(detail::format_verdict(verdict), cfg.output, out);
        if (!breakdowns_path.empty())
          write_csv(detail::verdict_rows(verdict, cfg.seed), breakdowns_path);
      }
    }
  } catch (const InfeasibleParameters& e) {
    err << "infeasible parameters: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

/// Convenience overload; `args` excludes the program name.
inline int dispatch(const std::vector<std::string>& args, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  std::vector<const char*> argv{"lymphnet"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace lymphnet
