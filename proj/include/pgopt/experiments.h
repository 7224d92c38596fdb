#ifndef PGOPT_EXPERIMENTS_H_
#define PGOPT_EXPERIMENTS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pgopt/config.h"
#include "pgopt/datagen.h"
#include "pgopt/losses.h"
#include "pgopt/model.h"
#include "pgopt/oracle.h"

namespace pgopt {

enum class RegretMode {
  kTrueMean,   // benchmark decisions pi(f*(X)); needs test.f_star
  kHindsight,  // benchmark decisions argmin_z Y'z
};

std::string RegretModeName(RegretMode mode);

// mean_i Y_i'(pi(f(X_i)) - pi(b_i)) / |mean_i Y_i' pi(b_i)| where b_i is the
// benchmark cost of `mode`. Throws std::domain_error on a zero denominator.
double NormalizedExcessRegret(const LinearModel& model, const Dataset& test, const Oracle& oracle,
                              RegretMode mode);

// Caches the benchmark decisions of a test set so many models can be scored
// against it. Each call equals NormalizedExcessRegret on the same inputs.
class RegretEvaluator {
 public:
  RegretEvaluator(const Dataset& test, const Oracle& oracle, RegretMode mode);
  double operator()(const LinearModel& model) const;

 private:
  const Dataset& test_;
  const Oracle& oracle_;
  std::vector<double> benchmark_cost_;  // Y_i' pi(b_i)
  double benchmark_mean_ = 0.0;
};

// Aggregate over trials for one (method, n[, h]) cell.
struct RegretReport {
  std::string method;
  int n = 0;
  std::optional<double> h;
  int trials = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single trial
  double ci95_half_width = 0.0;  // 1.96 std / sqrt(trials)
};

RegretReport Summarize(const std::string& method, int n, std::optional<double> h,
                       const std::vector<double>& regrets);

struct ResultRow {
  std::string experiment;
  std::string method;
  int n = 0;
  int trial = 0;
  double regret = 0.0;
  std::optional<double> chosen_h;
  int64_t wall_ms = 0;
};

// Argmin of one surrogate over the hypothesis grid of the zeroth-compare
// experiment, f(x) = slope * x + beta0.
struct ZerothRow {
  int trial = 0;
  std::string loss;
  double beta0 = 0.0;
  double surrogate = 0.0;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<RegretReport> reports;
  std::vector<ZerothRow> zeroth;
};

// The oracle each experiment solves against.
Oracle ExperimentOracle(const std::string& experiment);
RegretMode ExperimentRegretMode(const std::string& experiment);

// Portfolio experiment: the capped simplex with u = 0.25 over 12 assets.
inline constexpr int kPortfolioAssets = 12;
inline constexpr double kPortfolioCap = 0.25;

// beta0 grid, inclusive of both ends.
std::vector<double> BetaGrid(double lo, double hi, double step);

// Mean surrogate over the data for every beta0 of the grid; returns the first
// minimizer. `loss` may be the decision loss.
ZerothRow ZerothOrderArgmin(const Dataset& data, const LossKind& loss, const Oracle& oracle,
                            double slope, const std::vector<double>& grid);

// One Monte-Carlo replication: rows for every (method, n) (and every h for
// h-sensitivity), deterministic in (config, trial_index). Zeroth-compare
// argmins are appended to `zeroth` when non-null.
std::vector<ResultRow> RunTrial(const ExperimentConfig& config, int trial_index,
                                std::vector<ZerothRow>* zeroth = nullptr);

// Runs all trials on `threads` workers; rows come back sorted by
// (n, trial, method, h) regardless of the thread count.
ExperimentResult RunExperiment(const ExperimentConfig& config, int threads = 1);

// Regrets grouped by (method, n[, h]) in first-appearance order.
std::vector<RegretReport> AggregateRows(const ExperimentConfig& config,
                                        const std::vector<ResultRow>& rows);

std::string ResultsCsv(const std::vector<ResultRow>& rows);
std::string SummaryJson(const ExperimentConfig& config, const ExperimentResult& result);
std::string ZerothCsv(const std::vector<ZerothRow>& rows);

// Writes results.csv and summary.json (plus zeroth_compare.csv for that
// experiment) into out_dir, creating it if needed.
void WriteOutputs(const ExperimentConfig& config, const ExperimentResult& result,
                  const std::string& out_dir);

// Parses results.csv text back into rows (used to audit summary.json).
std::vector<ResultRow> ParseResultsCsv(const std::string& text);

}  // namespace pgopt

#endif  // PGOPT_EXPERIMENTS_H_
