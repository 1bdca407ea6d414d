#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ktsim/error.hpp"
#include "ktsim/monotonicity.hpp"
#include "ktsim/orchestrator.hpp"
#include "ktsim/serialize.hpp"

namespace ktsim::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOptions {
  bool quiet = false;
  std::size_t jobs = 1;
};

// Thrown once a command has decided its exit status and printed its output.
struct CommandExit {
  int code;
};

void write_file(const fs::path& path, const std::string& contents) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << contents;
  if (!f) throw IoError("failed writing " + path.string());
}

ScenarioConfig load_or_default(const std::string& path) {
  if (path.empty()) return ScenarioConfig{};
  if (!fs::exists(path)) throw IoError("config file not found: " + path);
  return load_scenario(path);
}

// Uses the explicit seed if any, otherwise draws one from the OS and reports it.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::optional<std::uint64_t> config, std::ostream& err) {
  if (flag) return *flag;
  if (config) return *config;
  std::random_device rd;
  const std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32U) ^ rd();
  err << "no seed given; using --seed " << seed << "\n";
  return seed;
}

void status_line(std::ostream& out, json doc) { out << doc.dump() << "\n"; }

void print_run_table(const RunResult& r, std::ostream& out) {
  char line[160];
  out << "scenario " << r.config.scenario << "  seed " << r.seed << "  channels " << combo_name(r.config.channels.mask())
      << "\n";
  std::snprintf(line, sizeof line, "%-12s %8s %8s %8s\n", "triple(ijl)", "claims", "true", "false");
  out << line;
  for (const TripleCounts& t : r.report.per_triple) {
    std::snprintf(line, sizeof line, "(%u,%u,%u)%*s %8zu %8zu %8zu\n", t.triple.experimenting, t.triple.mining,
                  t.triple.labeling, 5, "", t.claims, t.true_count, t.false_count);
    out << line;
  }
  std::snprintf(line, sizeof line, "union %zu  true %zu  false %zu  openness %lld  normalized %.4f\n",
                r.report.union_size, r.report.true_count, r.report.false_count,
                static_cast<long long>(r.report.openness), r.report.normalized);
  out << line;
}

void cmd_run(const GlobalOptions& g, const std::string& config_path, std::optional<std::uint64_t> seed_flag,
             const std::string& out_dir, std::ostream& out, std::ostream& err) {
  ScenarioConfig cfg = load_or_default(config_path);
  const std::uint64_t seed = resolve_seed(seed_flag, cfg.seed, err);
  const RunResult result = run(cfg, seed);

  const fs::path root(out_dir);
  write_file(root / "run.json", run_result_json(result));
  for (const SampledDataset& sd : result.upstream.datasets) {
    const std::string stem = "d" + std::to_string(sd.datasheet.team_id.index);
    write_file(root / "datasets" / (stem + ".csv"), dataset_csv(sd.dataset));
    write_file(root / "datasets" / (stem + ".datasheet.json"), to_json(sd.datasheet).dump(2) + "\n");
  }

  if (!g.quiet) print_run_table(result, out);
  status_line(out, {{"command", "run"},
                    {"status", "ok"},
                    {"seed", seed},
                    {"result", (root / "run.json").string()},
                    {"openness", result.report.openness},
                    {"normalized", result.report.normalized}});
}

bool non_empty_dir(const fs::path& p) {
  std::error_code ec;
  return fs::is_directory(p, ec) && !fs::is_empty(p, ec);
}

void cmd_sweep(const GlobalOptions& g, const std::string& config_path, std::optional<std::size_t> replicates,
               std::optional<std::uint64_t> seed_flag, const std::string& out_dir, bool force, std::ostream& out,
               std::ostream& err) {
  ScenarioConfig cfg = load_or_default(config_path);
  cfg.seed = resolve_seed(seed_flag, cfg.seed, err);
  const std::size_t reps = replicates.value_or(cfg.replicates);
  if (reps < 1) throw ConfigError("must be at least 1", "replicates");

  const fs::path root(out_dir);
  if (non_empty_dir(root)) {
    if (!force) throw IoError("output directory " + root.string() + " is not empty; pass --force to overwrite");
    std::error_code ec;
    fs::remove_all(root / cfg.scenario, ec);
    fs::remove(root / "sweep.csv", ec);
    fs::remove(root / "summary.json", ec);
  }

  SweepOptions opts;
  opts.replicates = reps;
  opts.jobs = g.jobs;
  opts.on_run = [&root](const RunResult& r, unsigned combo, std::size_t rep) {
    write_file(root / r.config.scenario / combo_name(combo) / (std::to_string(rep) + ".json"), run_result_json(r));
  };
  const SweepResult result = sweep(cfg, opts);
  write_file(root / "sweep.csv", sweep_csv(result));
  write_file(root / "summary.json", sweep_summary_json(result));

  if (!g.quiet) {
    char line[160];
    std::snprintf(line, sizeof line, "%-6s %6s %10s %10s %10s\n", "combo", "runs", "mean", "stddev", "norm");
    out << line;
    for (const ComboSummary& s : result.summaries) {
      std::snprintf(line, sizeof line, "%-6s %6zu %10.3f %10.3f %10.4f\n", combo_name(s.combo_mask).c_str(), s.runs,
                    s.mean_openness, s.stddev_openness, s.mean_normalized);
      out << line;
    }
    std::snprintf(line, sizeof line, "sign test all vs none: +%zu -%zu =%zu  p=%.3g\n", result.all_vs_none.positive,
                  result.all_vs_none.negative, result.all_vs_none.ties, result.all_vs_none.p_value);
    out << line;
  }
  status_line(out, {{"command", "sweep"},
                    {"status", "ok"},
                    {"seed", *cfg.seed},
                    {"rows", result.rows.size()},
                    {"csv", (root / "sweep.csv").string()},
                    {"summary", (root / "summary.json").string()},
                    {"sign_test_p", result.all_vs_none.p_value}});
}

void cmd_validate(const GlobalOptions& g, std::size_t trials, const std::string& config_path,
                  std::optional<std::uint64_t> seed_flag, bool break_passthrough, std::ostream& out,
                  std::ostream& err) {
  if (trials == 0) throw ConfigError("must be at least 1", "trials");
  ScenarioConfig cfg = load_or_default(config_path);
  cfg.labeling_params.break_passthrough = break_passthrough;
  const std::uint64_t seed = resolve_seed(seed_flag, cfg.seed, err);
  const MonotonicityReport report = validate_monotonicity(trials, cfg, seed, g.jobs);

  json transcripts = json::array();
  for (const MonotonicityTrial& t : report.violating) {
    transcripts.push_back(json{{"trial", t.index},
                               {"trial_seed", t.seed},
                               {"combo_mask", t.combo_mask},
                               {"added", {{"u", t.added.pair.u().index},
                                          {"v", t.added.pair.v().index},
                                          {"polarity", to_string(t.added.polarity)}}},
                               {"side", t.added_in_k ? "K" : "Kc"},
                               {"before", t.before},
                               {"after", t.after}});
  }
  if (!g.quiet) {
    out << "monotonicity: " << report.violations << " violation(s) in " << report.trials << " trial(s)"
        << (break_passthrough ? " [pass-through disabled]" : "") << "\n";
  }
  const bool ok = report.violations == 0;
  status_line(out, {{"command", "validate"},
                    {"status", ok ? "ok" : "violations"},
                    {"seed", seed},
                    {"trials", report.trials},
                    {"violations", report.violations},
                    {"transcripts", transcripts}});
  if (!ok) throw CommandExit{kValidationFailure};
}

void cmd_oracle(const GlobalOptions& g, double p_stay, std::size_t dist, double delta, std::size_t samples,
                std::optional<std::uint64_t> seed_flag, std::ostream& out, std::ostream& err) {
  if (!(p_stay > 0.5 && p_stay < 1.0)) throw ConfigError("must lie in (0.5, 1)", "p-stay");
  if (dist < 1) throw ConfigError("must be at least 1", "dist");
  if (!(delta >= 0.0 && delta < 0.5)) throw ConfigError("must lie in [0, 0.5)", "delta");
  if (samples < 1) throw ConfigError("must be at least 1", "samples");
  const std::uint64_t seed = resolve_seed(seed_flag, std::nullopt, err);

  const GroundTruth chain = make_chain(dist + 1, p_stay);
  ExperimentDesign design;
  design.measured = {VariableId{0}, VariableId{static_cast<std::uint32_t>(dist)}};
  design.noise_rate = delta;
  design.samples = samples;
  const SampledDataset sd = sample_dataset(chain, design, TeamId{}, seed);
  const auto phi = phi_coefficient(sd.dataset, design.measured[0], design.measured[1]);
  const double analytic =
      std::pow(2.0 * p_stay - 1.0, static_cast<double>(dist)) * (1.0 - 2.0 * delta) * (1.0 - 2.0 * delta);
  const double empirical = phi.value_or(0.0);

  if (!g.quiet) {
    char line[160];
    std::snprintf(line, sizeof line, "empirical %.6f  analytic %.6f  |diff| %.6f\n", empirical, analytic,
                  std::fabs(empirical - analytic));
    out << line;
  }
  status_line(out, {{"command", "oracle"},
                    {"status", "ok"},
                    {"seed", seed},
                    {"p_stay", p_stay},
                    {"dist", dist},
                    {"delta", delta},
                    {"samples", samples},
                    {"degenerate", !phi.has_value()},
                    {"empirical", empirical},
                    {"analytic", analytic},
                    {"abs_diff", std::fabs(empirical - analytic)}});
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Knowledge-translation simulator: channel sweeps, openness metric, monotonicity checks"};
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_flag("--quiet,-q", g.quiet, "Suppress human-readable output");
  app.add_option("--jobs,-j", g.jobs, "Worker threads for sweeps and validation")->check(CLI::PositiveNumber);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool force = false;

  auto* run_cmd = app.add_subcommand("run", "Execute one scenario run");
  run_cmd->add_option("--config", config_path, "Scenario JSON (defaults to the built-in scenario)");
  run_cmd->add_option("--seed", seed, "Seed for every random draw");
  run_cmd->add_option("--out", out_dir, "Output directory")->required();

  std::optional<std::size_t> replicates;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run all 8 channel combinations over paired replicates");
  sweep_cmd->add_option("--config", config_path, "Scenario JSON");
  sweep_cmd->add_option("--replicates", replicates, "Replicates per channel combination");
  sweep_cmd->add_option("--seed", seed, "Master seed (overrides the config)");
  sweep_cmd->add_option("--out", out_dir, "Results directory")->required();
  sweep_cmd->add_flag("--force", force, "Overwrite a non-empty results directory");

  std::size_t trials = 1000;
  bool break_passthrough = false;
  auto* validate_cmd = app.add_subcommand("validate", "Randomized monotonicity check of the labeling function");
  validate_cmd->add_option("--trials", trials, "Number of trials");
  validate_cmd->add_option("--config", config_path, "Scenario JSON");
  validate_cmd->add_option("--seed", seed, "Master seed (overrides the config)");
  validate_cmd->add_flag("--break-passthrough", break_passthrough, "Negative control: disable prior pass-through");

  double p_stay = 0.9;
  std::size_t dist = 1;
  double delta = 0.0;
  std::size_t samples = 100000;
  auto* oracle_cmd = app.add_subcommand("oracle", "Compare sampled phi with the path-product attenuation law");
  oracle_cmd->add_option("--p-stay", p_stay, "Probability a child copies its parent");
  oracle_cmd->add_option("--dist", dist, "Tree distance between the two variables");
  oracle_cmd->add_option("--delta", delta, "Bit-flip noise rate");
  oracle_cmd->add_option("--samples", samples, "Sample count");
  oracle_cmd->add_option("--seed", seed, "Sampling seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidConfig;
  }

  try {
    if (*run_cmd) {
      cmd_run(g, config_path, seed, out_dir, out, err);
    } else if (*sweep_cmd) {
      cmd_sweep(g, config_path, replicates, seed, out_dir, force, out, err);
    } else if (*validate_cmd) {
      cmd_validate(g, trials, config_path, seed, break_passthrough, out, err);
    } else if (*oracle_cmd) {
      cmd_oracle(g, p_stay, dist, delta, samples, seed, out, err);
    }
  } catch (const CommandExit& e) {
    return e.code;
  } catch (const ConfigError& e) {
    err << "invalid configuration: " << e.what() << "\n";
    return kInvalidConfig;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kIoError;
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << "\n";
    return kIoError;
  }
  return kSuccess;
}

}  // namespace ktsim::cli
