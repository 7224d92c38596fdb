#ifndef PGOPT_MODEL_H_
#define PGOPT_MODEL_H_

#include <cstdint>
#include <string>

#include "Eigen/Core"
#include "pgopt/oracle.h"

namespace pgopt {

// f(x) = W x + b with W of shape d x p.
struct LinearModel {
  Eigen::MatrixXd W;
  Eigen::VectorXd b;

  int cost_dim() const { return static_cast<int>(W.rows()); }
  int context_dim() const { return static_cast<int>(W.cols()); }

  bool operator==(const LinearModel&) const = default;
};

struct ParamGrad {
  Eigen::MatrixXd dW;
  Eigen::VectorXd db;
};

struct AdamState {
  Eigen::MatrixXd m_W, v_W;
  Eigen::VectorXd m_b, v_b;
  int64_t step = 0;
};

struct AdamOptions {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

CostVector Predict(const LinearModel& model, const Eigen::VectorXd& x);

// Chain rule through the linear map: dW = grad_t x', db = grad_t.
ParamGrad ParamGradient(const Eigen::VectorXd& grad_t, const Eigen::VectorXd& x);

AdamState ZeroAdamState(const LinearModel& model);

// One bias-corrected Adam update, in place.
void AdamStep(LinearModel& model, AdamState& state, const ParamGrad& grad,
              const AdamOptions& options = {});

enum class InitScheme { kZeros, kGaussian, kCopy };

LinearModel ZeroModel(int p, int d);
// Entries i.i.d. N(0, sigma^2) from a generator seeded with `seed`.
LinearModel GaussianModel(int p, int d, uint64_t seed, double sigma = 0.01);

// kCopy clones *source (which must be non-null and of shape d x p).
LinearModel InitModel(int p, int d, InitScheme scheme, uint64_t seed,
                      const LinearModel* source = nullptr);

// Flat JSON checkpoint: {"d":..,"p":..,"W":[row-major],"b":[..]}.
std::string ModelToJson(const LinearModel& model);
LinearModel ModelFromJson(const std::string& text);

}  // namespace pgopt

#endif  // PGOPT_MODEL_H_
