#include "pgopt/train.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "Eigen/Cholesky"

namespace pgopt {
namespace {

constexpr double kEtoRidge = 1e-8;

void ValidateConfig(const TrainConfig& config, int n_train) {
  if (config.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
  if (config.batch < 1 || config.batch > n_train) {
    throw std::invalid_argument("train: batch must lie in [1, n_train] (batch " +
                                std::to_string(config.batch) + ", n_train " +
                                std::to_string(n_train) + ")");
  }
  if (!(config.lr > 0.0)) throw std::invalid_argument("train: lr must be positive");
}

}  // namespace

std::string MethodName(Method method) {
  switch (method) {
    case Method::kEto: return "eto";
    case Method::kSpoPlus: return "spo-plus";
    case Method::kPgb: return "pgb";
    case Method::kPgc: return "pgc";
    case Method::kPgf: return "pgf";
  }
  return "unknown";
}

Method ParseMethod(const std::string& name) {
  for (Method m : {Method::kEto, Method::kSpoPlus, Method::kPgb, Method::kPgc, Method::kPgf}) {
    if (MethodName(m) == name) return m;
  }
  throw std::invalid_argument("unknown method '" + name +
                              "' (expected eto, spo-plus, pgb, pgc or pgf)");
}

bool IsPgMethod(Method method) {
  return method == Method::kPgb || method == Method::kPgc || method == Method::kPgf;
}

LossTag MethodLossTag(Method method) {
  switch (method) {
    case Method::kEto: return LossTag::kMse;
    case Method::kSpoPlus: return LossTag::kSpoPlus;
    case Method::kPgb: return LossTag::kPgb;
    case Method::kPgc: return LossTag::kPgc;
    case Method::kPgf: return LossTag::kPgf;
  }
  throw std::logic_error("unhandled method");
}

double MeanDecisionLoss(const LinearModel& model, const Dataset& data, const Oracle& oracle) {
  if (data.size() == 0) throw std::invalid_argument("decision loss: empty dataset");
  double total = 0.0;
  for (int i = 0; i < data.size(); ++i) {
    const CostVector t = Predict(model, data.X.row(i).transpose());
    total += data.Y.row(i).dot(oracle.Solve(t).decision);
  }
  return total / data.size();
}

TrainReport Fit(const Dataset& train, const Dataset& val, const LossKind& loss,
                const Oracle& oracle, const TrainConfig& config, const LinearModel& init) {
  const int n = train.size();
  if (n == 0) throw std::invalid_argument("train: empty training set");
  if (loss.tag() == LossTag::kDecision) {
    throw std::invalid_argument("train: the decision loss is for evaluation only");
  }
  if (loss.is_pg() && !loss.h()) throw std::invalid_argument("train: PG loss needs h");
  ValidateConfig(config, n);
  if (init.cost_dim() != train.cost_dim() || init.context_dim() != train.context_dim()) {
    throw std::invalid_argument("train: initial model shape does not match the data");
  }
  // Without a validation set, model selection falls back to the training decision loss.
  const Dataset& selection = val.size() > 0 ? val : train;

  std::vector<OracleSolution> y_solutions;
  if (loss.tag() == LossTag::kSpoPlus) {
    y_solutions.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) y_solutions.push_back(oracle.Solve(train.Y.row(i).transpose()));
  }

  LinearModel model = init;
  AdamState state = ZeroAdamState(model);
  AdamOptions adam;
  adam.lr = config.lr;
  std::mt19937_64 rng(config.seed);
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  TrainReport report;
  report.chosen_h = loss.h();
  report.val_curve.reserve(static_cast<size_t>(config.epochs));
  ParamGrad grad{Eigen::MatrixXd::Zero(model.W.rows(), model.W.cols()),
                 Eigen::VectorXd::Zero(model.b.size())};

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (int start = 0; start < n; start += config.batch) {
      const int stop = std::min(n, start + config.batch);
      grad.dW.setZero();
      grad.db.setZero();
      for (int k = start; k < stop; ++k) {
        const int i = order[static_cast<size_t>(k)];
        const Eigen::VectorXd x = train.X.row(i).transpose();
        const CostVector y = train.Y.row(i).transpose();
        const CostVector t = Predict(model, x);
        const LossEval eval = loss.tag() == LossTag::kSpoPlus
                                  ? SpoPlus(oracle, t, y, y_solutions[static_cast<size_t>(i)])
                                  : Evaluate(loss, oracle, t, y);
        grad.dW.noalias() += eval.grad_t * x.transpose();
        grad.db += eval.grad_t;
      }
      const double scale = 1.0 / (stop - start);
      grad.dW *= scale;
      grad.db *= scale;
      AdamStep(model, state, grad, adam);
    }
    const double val_loss = MeanDecisionLoss(model, selection, oracle);
    report.val_curve.push_back(val_loss);
    if (epoch == 0 || val_loss < report.val_curve[static_cast<size_t>(report.best_epoch)]) {
      report.best_epoch = epoch;
      report.best_model = model;
    }
  }
  report.final_model = std::move(model);
  return report;
}

std::vector<double> AutoHGrid(int n_train) {
  if (n_train < 1) throw std::invalid_argument("auto h grid: n_train must be >= 1");
  const double root = std::sqrt(static_cast<double>(n_train));
  return {0.25 / root, 1.0 / root, 4.0 / root, 16.0 / root, 0.001};
}

TrainReport SelectH(const Dataset& train, const Dataset& val, LossTag pg_tag,
                    const Oracle& oracle, const TrainConfig& config, const LinearModel& init) {
  if (!LossKind::IsPgTag(pg_tag)) throw std::invalid_argument("select_h: not a PG loss");
  std::vector<double> grid = config.h_grid.empty() ? AutoHGrid(train.size()) : config.h_grid;
  if (grid.empty()) throw std::invalid_argument("select_h: empty h grid");
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::optional<TrainReport> best;
  for (double h : grid) {
    TrainReport report = Fit(train, val, LossKind::Pg(pg_tag, h), oracle, config, init);
    if (!best || report.best_val_loss() < best->best_val_loss()) best = std::move(report);
  }
  return std::move(*best);
}

LinearModel FitEto(const Dataset& train) {
  const int n = train.size();
  if (n < 1) throw std::invalid_argument("eto: empty training set");
  const int p = train.context_dim();
  Eigen::MatrixXd design(n, p + 1);
  design.leftCols(p) = train.X;
  design.col(p).setOnes();
  Eigen::MatrixXd gram = design.transpose() * design;
  gram.diagonal().array() += kEtoRidge;
  const Eigen::LDLT<Eigen::MatrixXd> solver(gram);
  // One right-hand side per output coordinate.
  const Eigen::MatrixXd coef = solver.solve(design.transpose() * train.Y);  // (p+1) x d
  LinearModel model;
  model.W = coef.topRows(p).transpose();
  model.b = coef.row(p).transpose();
  return model;
}

TrainReport Pipeline(const Dataset& data, Method method, const Oracle& oracle,
                     const TrainConfig& config, const TrainReport* spo_warm_start) {
  if (config.val_size < 0 || data.size() < config.val_size + config.batch) {
    throw std::invalid_argument("pipeline: dataset has " + std::to_string(data.size()) +
                                " rows, need at least val_size + batch = " +
                                std::to_string(config.val_size + config.batch));
  }
  const int n_train = data.size() - config.val_size;
  const Dataset train = data.Slice(0, n_train);
  const Dataset val = data.Slice(n_train, config.val_size);
  const LinearModel zeros = ZeroModel(data.context_dim(), data.cost_dim());

  switch (method) {
    case Method::kEto: {
      TrainReport report;
      report.best_model = FitEto(train);
      report.final_model = report.best_model;
      report.val_curve = {MeanDecisionLoss(report.best_model, val.size() > 0 ? val : train, oracle)};
      return report;
    }
    case Method::kSpoPlus:
      return Fit(train, val, LossKind::SpoPlus(), oracle, config, zeros);
    case Method::kPgb:
    case Method::kPgc:
    case Method::kPgf: {
      if (!config.warm_start) {
        return SelectH(train, val, MethodLossTag(method), oracle, config, zeros);
      }
      if (spo_warm_start != nullptr) {
        return SelectH(train, val, MethodLossTag(method), oracle, config,
                       spo_warm_start->best_model);
      }
      const TrainReport spo = Fit(train, val, LossKind::SpoPlus(), oracle, config, zeros);
      return SelectH(train, val, MethodLossTag(method), oracle, config, spo.best_model);
    }
  }
  throw std::logic_error("pipeline: unhandled method");
}

}  // namespace pgopt
