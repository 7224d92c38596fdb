#include "pgopt/cli.h"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pgopt/config.h"
#include "pgopt/datagen.h"
#include "pgopt/experiments.h"

namespace pgopt {
namespace {

struct RunFlags {
  std::string config_path;
  std::string experiment;
  std::string out_dir = "results";
  int threads = 1;
  uint64_t seed = 0;
  bool timing = false;

  int trials = 0;
  std::vector<int> n;
  std::vector<std::string> methods;
  int test_size = 0;
  int epochs = 0;
  int batch = 0;
  double lr = 0.0;
  int val_size = 0;
  std::vector<std::string> h_grid;
  std::vector<double> h_values;
  double m = 0.0;
  double alpha = 0.0;
  double noise_multiplier = 0.0;
  std::string noise;
  uint64_t bstar_seed = 0;
  std::string returns;
  bool returns_in_percent = false;
  double noise_scale = 0.0;
  bool no_warm_start = false;
  double zeroth_h = 0.0;
};

std::string Fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::optional<uint64_t> SeedFromEnv() {
  const char* raw = std::getenv("PGOPT_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (*end != '\0') throw ConfigError("PGOPT_SEED: not a non-negative integer: '" + std::string(raw) + "'");
  return static_cast<uint64_t>(v);
}

// Applies every flag the user actually passed on top of `config`.
void ApplyOverrides(const CLI::App& run, const RunFlags& f, ExperimentConfig& c) {
  auto given = [&run](const std::string& name) { return run.count(name) > 0; };
  if (given("--trials")) c.trials = f.trials;
  if (given("--n")) c.n = f.n;
  if (given("--methods")) c.methods = f.methods;
  if (given("--test-size")) c.test_size = f.test_size;
  if (given("--epochs")) c.train.epochs = f.epochs;
  if (given("--batch")) c.train.batch = f.batch;
  if (given("--lr")) c.train.lr = f.lr;
  if (given("--val-size")) c.train.val_size = f.val_size;
  if (given("--h-grid")) {
    c.train.h_grid.clear();
    if (!(f.h_grid.size() == 1 && f.h_grid[0] == "auto")) {
      for (const auto& h : f.h_grid) {
        try {
          c.train.h_grid.push_back(std::stod(h));
        } catch (const std::exception&) {
          throw ConfigError("flag --h-grid: '" + h + "' is not a number");
        }
      }
    }
  }
  if (given("--h-values")) c.h_values = f.h_values;
  if (given("--m")) c.generator.m = f.m;
  if (given("--alpha")) c.generator.alpha = f.alpha;
  if (given("--noise-multiplier")) c.generator.noise_multiplier = f.noise_multiplier;
  if (given("--noise")) c.generator.noise = f.noise;
  if (given("--bstar-seed")) c.generator.bstar_seed = f.bstar_seed;
  if (given("--returns")) c.generator.returns_path = f.returns;
  if (given("--returns-in-percent")) c.generator.returns_in_percent = true;
  if (given("--noise-scale")) c.generator.noise_scale = f.noise_scale;
  if (given("--no-warm-start")) c.train.warm_start = false;
  if (given("--zeroth-h")) c.zeroth.h = f.zeroth_h;
  if (given("--timing")) c.record_timing = true;
}

void PrintSummary(const ExperimentConfig& config, const ExperimentResult& result, std::ostream& out) {
  out << "experiment " << config.experiment << " (" << config.trials << " trials, "
      << RegretModeName(ExperimentRegretMode(config.experiment)) << " normalization)\n";
  out << "method       n      h        mean      ci95\n";
  for (const auto& r : result.reports) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-10s %6d %8s %9.5f %9.5f\n", r.method.c_str(), r.n,
                  r.h ? Fmt("%.3g", *r.h).c_str() : "-", r.mean, r.ci95_half_width);
    out << line;
  }
}

}  // namespace

int CliMain(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Perturbation-gradient losses for predict-then-optimize: experiment runner"};
  app.name("pgopt");
  app.require_subcommand(1);

  app.add_subcommand("list-experiments", "Print the available experiment names");

  auto* validate = app.add_subcommand("validate-config", "Parse and check a TOML config");
  std::string validate_path;
  validate->add_option("config,--config", validate_path, "TOML config file")->required();

  auto* run = app.add_subcommand("run", "Run an experiment and write results.csv / summary.json");
  RunFlags f;
  auto* config_opt = run->add_option("--config", f.config_path, "TOML config file");
  auto* exp_opt = run->add_option("--experiment", f.experiment, "Experiment name");
  config_opt->excludes(exp_opt);
  run->add_option("--out-dir", f.out_dir, "Output directory")->capture_default_str();
  run->add_option("--threads", f.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  run->add_option("--seed", f.seed, "Master seed (overrides PGOPT_SEED and the config)");
  run->add_flag("--timing", f.timing, "Record wall_ms per row (makes results.csv run-dependent)");
  run->add_option("--trials", f.trials, "Monte-Carlo trials");
  run->add_option("--n", f.n, "Training sizes, comma separated")->delimiter(',');
  run->add_option("--methods", f.methods, "Methods, comma separated")->delimiter(',');
  run->add_option("--test-size", f.test_size, "Test rows per trial");
  run->add_option("--epochs", f.epochs, "Adam epochs");
  run->add_option("--batch", f.batch, "Minibatch size");
  run->add_option("--lr", f.lr, "Adam learning rate");
  run->add_option("--val-size", f.val_size, "Validation rows");
  run->add_option("--h-grid", f.h_grid, "'auto' or comma separated h values")->delimiter(',');
  run->add_option("--h-values", f.h_values, "h values for h-sensitivity")->delimiter(',');
  run->add_option("--m", f.m, "Elbow slope for simple-misspec");
  run->add_option("--alpha", f.alpha, "Noise asymmetry for simple-misspec");
  run->add_option("--noise-multiplier", f.noise_multiplier, "Scale of the simple-misspec noise");
  run->add_option("--noise", f.noise, "Arc noise: mult-uniform or add-gaussian");
  run->add_option("--bstar-seed", f.bstar_seed, "Seed of the fixed B* matrix");
  run->add_option("--returns", f.returns, "Monthly returns CSV (12 columns)");
  run->add_flag("--returns-in-percent", f.returns_in_percent, "Returns CSV is in percent");
  run->add_option("--noise-scale", f.noise_scale, "Portfolio context noise scale");
  run->add_flag("--no-warm-start", f.no_warm_start, "Start PG losses from zeros");
  run->add_option("--zeroth-h", f.zeroth_h, "h for zeroth-compare");

  auto* synth = app.add_subcommand("write-synthetic-returns",
                                   "Write the built-in synthetic 12-asset return history");
  std::string synth_out;
  int synth_months = 121;
  synth->add_option("--out", synth_out, "Output CSV")->required();
  synth->add_option("--months", synth_months, "Rows")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (app.got_subcommand("list-experiments")) {
      for (const auto& name : ExperimentNames()) out << name << '\n';
      return 0;
    }
    if (app.got_subcommand(validate)) {
      const ExperimentConfig config = LoadConfigFile(validate_path);
      out << "ok: " << config.experiment << " (" << config.methods.size() << " methods, "
          << config.n.size() << " sample sizes, " << config.trials << " trials)\n";
      return 0;
    }
    if (app.got_subcommand(synth)) {
      WriteReturnsCsv(SyntheticReturns(synth_months), synth_out);
      out << "wrote " << synth_months << " rows to " << synth_out << '\n';
      return 0;
    }

    // run
    ExperimentConfig config;
    if (!f.config_path.empty()) {
      config = LoadConfigFile(f.config_path);
    } else if (!f.experiment.empty()) {
      config = DefaultConfig(f.experiment);
    } else {
      err << "error: run needs --config or --experiment\n\n" << run->help();
      return 2;
    }
    ApplyOverrides(*run, f, config);
    if (run->count("--seed") > 0) {
      config.seed = f.seed;
    } else if (auto env = SeedFromEnv()) {
      config.seed = *env;
    }
    ValidateConfig(config);

    const ExperimentResult result = RunExperiment(config, f.threads);
    WriteOutputs(config, result, f.out_dir);
    PrintSummary(config, result, out);
    out << "wrote " << result.rows.size() << " rows to " << f.out_dir << "/results.csv\n";
    return 0;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace pgopt
