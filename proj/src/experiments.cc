#include "pgopt/experiments.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "pgopt/train.h"

namespace pgopt {
namespace {

// Roles keep the seed streams of one trial apart.
constexpr uint64_t kTrainRole = 1;
constexpr uint64_t kTestRole = 2;
constexpr uint64_t kFitRole = 3;
constexpr uint64_t kBStarRole = 0xb57a2;

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Everything fixed for the whole experiment.
struct Context {
  const ExperimentConfig& config;
  Oracle oracle;
  RegretMode mode;
  uint64_t bstar_seed = 0;
  Eigen::MatrixXd returns;
};

Context MakeContext(const ExperimentConfig& config) {
  ValidateConfig(config);
  Context ctx{config, ExperimentOracle(config.experiment), ExperimentRegretMode(config.experiment),
              config.generator.bstar_seed.value_or(MixSeed(config.seed, kBStarRole)), {}};
  if (config.experiment == "portfolio") {
    if (config.generator.returns_path.empty()) {
      ctx.returns = SyntheticReturns();
    } else {
      ReturnsCsvOptions options;
      options.in_percent = config.generator.returns_in_percent;
      ctx.returns = LoadReturnsCsv(config.generator.returns_path, options);
    }
  }
  return ctx;
}

Dataset Generate(const Context& ctx, int rows, uint64_t seed) {
  const auto& e = ctx.config.experiment;
  const auto& g = ctx.config.generator;
  if (e == "simple-misspec" || e == "zeroth-compare") {
    return GenSimpleMisspec(rows, g.m, g.alpha, seed, g.noise_multiplier);
  }
  if (e == "shortest-random") return GenShortestPath(rows, ParseArcNoise(g.noise), seed, ctx.bstar_seed);
  if (e == "shortest-planted" || e == "h-sensitivity") {
    return GenPlantedPath(rows, ParseArcNoise(g.noise), seed, ctx.bstar_seed);
  }
  if (e == "portfolio") return GenPortfolio(ctx.returns, rows, g.noise_scale, seed);
  throw std::logic_error("generate: unhandled experiment " + e);
}

class Stopwatch {
 public:
  explicit Stopwatch(bool enabled) : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}
  int64_t ElapsedMs() const {
    if (!enabled_) return 0;
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

std::vector<ResultRow> RunTrialWithContext(const Context& ctx, int trial_index,
                                           std::vector<ZerothRow>* zeroth) {
  const ExperimentConfig& config = ctx.config;
  const uint64_t trial_seed = MixSeed(config.seed, static_cast<uint64_t>(trial_index));
  const Dataset test = Generate(ctx, config.test_size, MixSeed(trial_seed, kTestRole));
  const RegretEvaluator regret(test, ctx.oracle, ctx.mode);
  std::vector<ResultRow> rows;
  auto emit = [&](const std::string& method, int n, double value, std::optional<double> h,
                  int64_t ms) {
    rows.push_back({config.experiment, method, n, trial_index, value, h, ms});
  };

  for (int n : config.n) {
    const uint64_t data_seed = MixSeed(MixSeed(trial_seed, kTrainRole), static_cast<uint64_t>(n));

    if (config.experiment == "zeroth-compare") {
      const Dataset data = Generate(ctx, n, data_seed);
      const double h = config.zeroth.h.value_or(1.0 / std::sqrt(static_cast<double>(n)));
      const auto grid = BetaGrid(config.zeroth.beta_min, config.zeroth.beta_max,
                                 config.zeroth.beta_step);
      for (const auto& name : config.methods) {
        Stopwatch watch(config.record_timing);
        const LossKind loss = name == "decision" ? LossKind::Decision() : LossKind::Parse(name, h);
        ZerothRow best = ZerothOrderArgmin(data, loss, ctx.oracle, config.zeroth.slope, grid);
        best.trial = trial_index;
        LinearModel model = ZeroModel(1, 1);
        model.W(0, 0) = config.zeroth.slope;
        model.b[0] = best.beta0;
        emit(name, n, regret(model), loss.h(), watch.ElapsedMs());
        if (zeroth != nullptr) zeroth->push_back(best);
      }
      continue;
    }

    const Dataset data = Generate(ctx, n + config.train.val_size, data_seed);
    TrainConfig train = config.train;
    train.seed = MixSeed(MixSeed(trial_seed, kFitRole), static_cast<uint64_t>(n));
    train.batch = std::min(train.batch, n);

    const bool any_pg = std::any_of(config.methods.begin(), config.methods.end(),
                                    [](const std::string& m) { return IsPgMethod(ParseMethod(m)); });
    const bool has_spo =
        std::find(config.methods.begin(), config.methods.end(), "spo-plus") != config.methods.end();
    std::optional<TrainReport> spo;
    int64_t spo_ms = 0;
    if (has_spo || (any_pg && train.warm_start)) {
      Stopwatch watch(config.record_timing);
      spo = Pipeline(data, Method::kSpoPlus, ctx.oracle, train);
      spo_ms = watch.ElapsedMs();
    }

    if (config.experiment == "h-sensitivity") {
      const int n_train = data.size() - train.val_size;
      const Dataset fit_part = data.Slice(0, n_train);
      const Dataset val = data.Slice(n_train, train.val_size);
      const LinearModel init =
          train.warm_start ? spo->best_model : ZeroModel(data.context_dim(), data.cost_dim());
      for (const auto& name : config.methods) {
        for (double h : config.h_values) {
          Stopwatch watch(config.record_timing);
          const TrainReport report = Fit(fit_part, val, LossKind::Pg(MethodLossTag(ParseMethod(name)), h),
                                         ctx.oracle, train, init);
          emit(name, n, regret(report.best_model), h, watch.ElapsedMs());
        }
      }
      continue;
    }

    for (const auto& name : config.methods) {
      const Method method = ParseMethod(name);
      Stopwatch watch(config.record_timing);
      TrainReport report;
      if (method == Method::kSpoPlus) {
        report = *spo;
      } else {
        report = Pipeline(data, method, ctx.oracle, train, spo ? &*spo : nullptr);
      }
      const int64_t ms = watch.ElapsedMs() + (method == Method::kSpoPlus ? spo_ms : 0);
      emit(name, n, regret(report.best_model), report.chosen_h, ms);
    }
  }
  return rows;
}

int MethodRank(const ExperimentConfig& config, const std::string& method) {
  const auto it = std::find(config.methods.begin(), config.methods.end(), method);
  return static_cast<int>(it - config.methods.begin());
}

int NRank(const ExperimentConfig& config, int n) {
  const auto it = std::find(config.n.begin(), config.n.end(), n);
  return static_cast<int>(it - config.n.begin());
}

void SortRows(const ExperimentConfig& config, std::vector<ResultRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [&config](const ResultRow& a, const ResultRow& b) {
    return std::make_tuple(NRank(config, a.n), a.trial, MethodRank(config, a.method),
                           a.chosen_h.value_or(0.0)) <
           std::make_tuple(NRank(config, b.n), b.trial, MethodRank(config, b.method),
                           b.chosen_h.value_or(0.0));
  });
}

}  // namespace

Oracle ExperimentOracle(const std::string& experiment) {
  if (experiment == "simple-misspec" || experiment == "zeroth-compare") return Oracle::Binary(1);
  if (experiment == "shortest-random" || experiment == "shortest-planted" ||
      experiment == "h-sensitivity") {
    return Oracle::GridPath(5);
  }
  if (experiment == "portfolio") return Oracle::CappedSimplex(kPortfolioAssets, kPortfolioCap);
  throw ConfigError("config key 'experiment': unknown experiment '" + experiment + "'");
}

RegretMode ExperimentRegretMode(const std::string& experiment) {
  return experiment == "portfolio" ? RegretMode::kHindsight : RegretMode::kTrueMean;
}

std::vector<double> BetaGrid(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw std::invalid_argument("beta grid: bad range");
  std::vector<double> grid;
  const auto count = static_cast<int64_t>(std::floor((hi - lo) / step + 1e-9));
  for (int64_t k = 0; k <= count; ++k) grid.push_back(lo + static_cast<double>(k) * step);
  return grid;
}

ZerothRow ZerothOrderArgmin(const Dataset& data, const LossKind& loss, const Oracle& oracle,
                            double slope, const std::vector<double>& grid) {
  if (data.context_dim() != 1 || data.cost_dim() != 1) {
    throw std::invalid_argument("zeroth-compare: expects p = d = 1 data");
  }
  if (grid.empty()) throw std::invalid_argument("zeroth-compare: empty grid");
  ZerothRow best{0, loss.name(), grid.front(), 0.0};
  bool first = true;
  CostVector t(1);
  CostVector y(1);
  for (double beta0 : grid) {
    double total = 0.0;
    for (int i = 0; i < data.size(); ++i) {
      t[0] = slope * data.X(i, 0) + beta0;
      y[0] = data.Y(i, 0);
      total += Evaluate(loss, oracle, t, y).value;
    }
    const double mean = total / data.size();
    if (first || mean < best.surrogate) {
      best.beta0 = beta0;
      best.surrogate = mean;
      first = false;
    }
  }
  return best;
}

std::vector<ResultRow> RunTrial(const ExperimentConfig& config, int trial_index,
                                std::vector<ZerothRow>* zeroth) {
  const Context ctx = MakeContext(config);
  return RunTrialWithContext(ctx, trial_index, zeroth);
}

ExperimentResult RunExperiment(const ExperimentConfig& config, int threads) {
  const Context ctx = MakeContext(config);
  const int trials = config.trials;
  std::vector<std::vector<ResultRow>> per_trial(static_cast<size_t>(trials));
  std::vector<std::vector<ZerothRow>> per_trial_zeroth(static_cast<size_t>(trials));
  std::vector<std::exception_ptr> errors(static_cast<size_t>(trials));
  std::atomic<int> next{0};

  auto worker = [&]() {
    for (int k = next.fetch_add(1); k < trials; k = next.fetch_add(1)) {
      try {
        per_trial[static_cast<size_t>(k)] =
            RunTrialWithContext(ctx, k, &per_trial_zeroth[static_cast<size_t>(k)]);
      } catch (...) {
        errors[static_cast<size_t>(k)] = std::current_exception();
      }
    }
  };
  const int workers = std::clamp(threads, 1, std::max(1, trials));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  for (int k = 0; k < trials; ++k) {
    if (!errors[static_cast<size_t>(k)]) continue;
    try {
      std::rethrow_exception(errors[static_cast<size_t>(k)]);
    } catch (const std::exception& err) {
      throw std::runtime_error("trial " + std::to_string(k) + ": " + err.what());
    }
  }

  ExperimentResult result;
  for (int k = 0; k < trials; ++k) {
    auto& rows = per_trial[static_cast<size_t>(k)];
    result.rows.insert(result.rows.end(), rows.begin(), rows.end());
    auto& z = per_trial_zeroth[static_cast<size_t>(k)];
    result.zeroth.insert(result.zeroth.end(), z.begin(), z.end());
  }
  SortRows(config, result.rows);
  result.reports = AggregateRows(config, result.rows);
  return result;
}

std::vector<RegretReport> AggregateRows(const ExperimentConfig& config,
                                        const std::vector<ResultRow>& rows) {
  const bool by_h = config.experiment == "h-sensitivity";
  using Key = std::tuple<int, int, double>;  // method rank, n rank, h
  std::map<Key, std::vector<double>> groups;
  std::map<Key, const ResultRow*> exemplar;
  for (const auto& row : rows) {
    const Key key{MethodRank(config, row.method), NRank(config, row.n),
                  by_h ? row.chosen_h.value_or(0.0) : 0.0};
    groups[key].push_back(row.regret);
    exemplar.emplace(key, &row);
  }
  std::vector<RegretReport> reports;
  for (const auto& [key, regrets] : groups) {
    const ResultRow& row = *exemplar.at(key);
    reports.push_back(Summarize(row.method, row.n,
                                by_h ? row.chosen_h : std::nullopt, regrets));
  }
  return reports;
}

std::string ResultsCsv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << "experiment,method,n,trial,regret,chosen_h,wall_ms\n";
  for (const auto& r : rows) {
    out << r.experiment << ',' << r.method << ',' << r.n << ',' << r.trial << ','
        << FormatDouble(r.regret) << ',' << (r.chosen_h ? FormatDouble(*r.chosen_h) : "") << ','
        << r.wall_ms << '\n';
  }
  return out.str();
}

std::vector<ResultRow> ParseResultsCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (line != "experiment,method,n,trial,regret,chosen_h,wall_ms") {
    throw std::runtime_error("results csv: unexpected header '" + line + "'");
  }
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (line.back() == ',') f.emplace_back();
    if (f.size() != 7) throw std::runtime_error("results csv: bad row '" + line + "'");
    ResultRow row{f[0], f[1], std::stoi(f[2]), std::stoi(f[3]), std::stod(f[4]), std::nullopt,
                  std::stoll(f[6])};
    if (!f[5].empty()) row.chosen_h = std::stod(f[5]);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string SummaryJson(const ExperimentConfig& config, const ExperimentResult& result) {
  nlohmann::ordered_json j;
  j["experiment"] = config.experiment;
  j["normalization"] = RegretModeName(ExperimentRegretMode(config.experiment));
  j["seed"] = config.seed;
  j["trials"] = config.trials;
  j["test_size"] = config.test_size;
  if (config.experiment == "portfolio") {
    j["returns_source"] =
        config.generator.returns_path.empty() ? "synthetic" : config.generator.returns_path;
  }
  nlohmann::ordered_json reports = nlohmann::ordered_json::array();
  for (const auto& r : result.reports) {
    nlohmann::ordered_json e;
    e["method"] = r.method;
    e["n"] = r.n;
    if (r.h) e["h"] = *r.h;
    e["trials"] = r.trials;
    e["mean"] = r.mean;
    e["std"] = r.stddev;
    e["ci95_half_width"] = r.ci95_half_width;
    reports.push_back(std::move(e));
  }
  j["reports"] = std::move(reports);
  return j.dump(2) + "\n";
}

std::string ZerothCsv(const std::vector<ZerothRow>& rows) {
  std::ostringstream out;
  out << "trial,loss,beta0,surrogate\n";
  for (const auto& r : rows) {
    out << r.trial << ',' << r.loss << ',' << FormatDouble(r.beta0) << ','
        << FormatDouble(r.surrogate) << '\n';
  }
  return out.str();
}

void WriteOutputs(const ExperimentConfig& config, const ExperimentResult& result,
                  const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + out_dir + "': " + ec.message());
  auto write = [&out_dir](const std::string& name, const std::string& body) {
    const fs::path path = fs::path(out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    out << body;
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  };
  write("results.csv", ResultsCsv(result.rows));
  write("summary.json", SummaryJson(config, result));
  if (config.experiment == "zeroth-compare") write("zeroth_compare.csv", ZerothCsv(result.zeroth));
}

}  // namespace pgopt
