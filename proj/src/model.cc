#include "pgopt/model.h"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace pgopt {

CostVector Predict(const LinearModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.W.cols()) {
    throw std::invalid_argument("predict: context has dimension " + std::to_string(x.size()) +
                                ", model expects " + std::to_string(model.W.cols()));
  }
  return model.W * x + model.b;
}

ParamGrad ParamGradient(const Eigen::VectorXd& grad_t, const Eigen::VectorXd& x) {
  return {grad_t * x.transpose(), grad_t};
}

AdamState ZeroAdamState(const LinearModel& model) {
  AdamState state;
  state.m_W = Eigen::MatrixXd::Zero(model.W.rows(), model.W.cols());
  state.v_W = state.m_W;
  state.m_b = Eigen::VectorXd::Zero(model.b.size());
  state.v_b = state.m_b;
  return state;
}

void AdamStep(LinearModel& model, AdamState& state, const ParamGrad& grad,
              const AdamOptions& options) {
  if (grad.dW.rows() != model.W.rows() || grad.dW.cols() != model.W.cols() ||
      grad.db.size() != model.b.size()) {
    throw std::invalid_argument("adam: gradient shape does not match model");
  }
  ++state.step;
  const double b1 = options.beta1;
  const double b2 = options.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(state.step));

  state.m_W = b1 * state.m_W + (1.0 - b1) * grad.dW;
  state.v_W = b2 * state.v_W + (1.0 - b2) * grad.dW.cwiseAbs2();
  state.m_b = b1 * state.m_b + (1.0 - b1) * grad.db;
  state.v_b = b2 * state.v_b + (1.0 - b2) * grad.db.cwiseAbs2();

  const double step_size = options.lr;
  model.W.array() -= step_size * (state.m_W.array() / correction1) /
                     ((state.v_W.array() / correction2).sqrt() + options.eps);
  model.b.array() -= step_size * (state.m_b.array() / correction1) /
                     ((state.v_b.array() / correction2).sqrt() + options.eps);
}

LinearModel ZeroModel(int p, int d) {
  return {Eigen::MatrixXd::Zero(d, p), Eigen::VectorXd::Zero(d)};
}

LinearModel GaussianModel(int p, int d, uint64_t seed, double sigma) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  LinearModel model = ZeroModel(p, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < p; ++j) model.W(i, j) = normal(rng);
  }
  for (int i = 0; i < d; ++i) model.b[i] = normal(rng);
  return model;
}

LinearModel InitModel(int p, int d, InitScheme scheme, uint64_t seed,
                      const LinearModel* source) {
  switch (scheme) {
    case InitScheme::kZeros: return ZeroModel(p, d);
    case InitScheme::kGaussian: return GaussianModel(p, d, seed);
    case InitScheme::kCopy:
      if (source == nullptr || source->cost_dim() != d || source->context_dim() != p) {
        throw std::invalid_argument("init: copy source missing or of the wrong shape");
      }
      return *source;
  }
  throw std::logic_error("init: unhandled scheme");
}

std::string ModelToJson(const LinearModel& model) {
  nlohmann::ordered_json j;
  j["d"] = model.W.rows();
  j["p"] = model.W.cols();
  std::vector<double> w;
  w.reserve(static_cast<size_t>(model.W.size()));
  for (Eigen::Index r = 0; r < model.W.rows(); ++r) {
    for (Eigen::Index c = 0; c < model.W.cols(); ++c) w.push_back(model.W(r, c));
  }
  j["W"] = w;
  j["b"] = std::vector<double>(model.b.data(), model.b.data() + model.b.size());
  return j.dump();
}

LinearModel ModelFromJson(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const int d = j.at("d").get<int>();
  const int p = j.at("p").get<int>();
  const auto w = j.at("W").get<std::vector<double>>();
  const auto b = j.at("b").get<std::vector<double>>();
  if (d < 1 || p < 1 || w.size() != static_cast<size_t>(d) * static_cast<size_t>(p) ||
      b.size() != static_cast<size_t>(d)) {
    throw std::invalid_argument("model json: inconsistent shapes");
  }
  LinearModel model = ZeroModel(p, d);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < p; ++c) model.W(r, c) = w[static_cast<size_t>(r * p + c)];
  }
  for (int r = 0; r < d; ++r) model.b[r] = b[static_cast<size_t>(r)];
  return model;
}

}  // namespace pgopt
