#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "pgopt/experiments.h"

namespace pgopt {

std::string RegretModeName(RegretMode mode) {
  return mode == RegretMode::kTrueMean ? "true-mean" : "hindsight";
}

RegretEvaluator::RegretEvaluator(const Dataset& test, const Oracle& oracle, RegretMode mode)
    : test_(test), oracle_(oracle) {
  if (test.size() == 0) throw std::invalid_argument("regret: empty test set");
  if (mode == RegretMode::kTrueMean && !test.f_star) {
    throw std::invalid_argument("regret: true-mean mode needs f_star; use hindsight mode");
  }
  benchmark_cost_.reserve(static_cast<size_t>(test.size()));
  double total = 0.0;
  for (int i = 0; i < test.size(); ++i) {
    const CostVector bench = mode == RegretMode::kTrueMean ? CostVector(test.f_star->row(i))
                                                           : CostVector(test.Y.row(i));
    const double cost = test.Y.row(i).dot(oracle.Solve(bench).decision);
    benchmark_cost_.push_back(cost);
    total += cost;
  }
  benchmark_mean_ = total / test.size();
  if (benchmark_mean_ == 0.0) {
    throw std::domain_error("regret: benchmark policy has zero mean cost; ratio undefined");
  }
}

double RegretEvaluator::operator()(const LinearModel& model) const {
  double excess = 0.0;
  for (int i = 0; i < test_.size(); ++i) {
    const CostVector t = Predict(model, test_.X.row(i).transpose());
    excess += test_.Y.row(i).dot(oracle_.Solve(t).decision) - benchmark_cost_[static_cast<size_t>(i)];
  }
  return (excess / test_.size()) / std::abs(benchmark_mean_);
}

double NormalizedExcessRegret(const LinearModel& model, const Dataset& test, const Oracle& oracle,
                              RegretMode mode) {
  return RegretEvaluator(test, oracle, mode)(model);
}

RegretReport Summarize(const std::string& method, int n, std::optional<double> h,
                       const std::vector<double>& regrets) {
  if (regrets.empty()) throw std::invalid_argument("summarize: no trials");
  RegretReport report{method, n, h, static_cast<int>(regrets.size()), 0.0, 0.0, 0.0};
  double sum = 0.0;
  for (double r : regrets) sum += r;
  report.mean = sum / regrets.size();
  if (regrets.size() > 1) {
    double ss = 0.0;
    for (double r : regrets) ss += (r - report.mean) * (r - report.mean);
    report.stddev = std::sqrt(ss / (regrets.size() - 1));
  }
  report.ci95_half_width = 1.96 * report.stddev / std::sqrt(static_cast<double>(regrets.size()));
  return report;
}

}  // namespace pgopt
