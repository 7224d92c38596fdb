#ifndef PGOPT_LOSSES_H_
#define PGOPT_LOSSES_H_

#include <optional>
#include <string>

#include "Eigen/Core"
#include "pgopt/oracle.h"

namespace pgopt {

// Surrogate value and its gradient with respect to the predicted cost t.
struct LossEval {
  double value = 0.0;
  Eigen::VectorXd grad_t;
};

enum class LossTag { kDecision, kPgb, kPgc, kPgf, kSpoPlus, kMse };

// A loss together with its perturbation size h (PG losses only).
class LossKind {
 public:
  static LossKind Decision() { return LossKind(LossTag::kDecision, std::nullopt); }
  static LossKind SpoPlus() { return LossKind(LossTag::kSpoPlus, std::nullopt); }
  static LossKind Mse() { return LossKind(LossTag::kMse, std::nullopt); }
  // Throws std::invalid_argument unless tag is a PG tag and h > 0.
  static LossKind Pg(LossTag tag, double h);

  // Parses "decision", "pgb", "pgc", "pgf", "spo-plus" or "mse". PG kinds get
  // `h` (which may be absent here and supplied later through WithH).
  static LossKind Parse(const std::string& name, std::optional<double> h = std::nullopt);

  LossKind WithH(double h) const { return Pg(tag_, h); }

  LossTag tag() const { return tag_; }
  std::optional<double> h() const { return h_; }
  bool is_pg() const { return IsPgTag(tag_); }
  std::string name() const;

  static bool IsPgTag(LossTag tag) {
    return tag == LossTag::kPgb || tag == LossTag::kPgc || tag == LossTag::kPgf;
  }

 private:
  LossKind(LossTag tag, std::optional<double> h) : tag_(tag), h_(h) {}
  LossTag tag_;
  std::optional<double> h_;
};

std::string LossTagName(LossTag tag);

// l(t, y) = y' pi(t). Piecewise constant, so grad_t is reported as zero; use
// for evaluation only.
LossEval DecisionLoss(const Oracle& oracle, const CostVector& t, const CostVector& y);

// Backward difference (V(t) - V(t - h y)) / h. Upper-bounds the decision loss.
LossEval Pgb(const Oracle& oracle, const CostVector& t, const CostVector& y, double h);

// Central difference (V(t + h y) - V(t - h y)) / (2h).
LossEval Pgc(const Oracle& oracle, const CostVector& t, const CostVector& y, double h);

// Forward difference (V(t + h y) - V(t)) / h. Lower-bounds the decision loss.
LossEval Pgf(const Oracle& oracle, const CostVector& t, const CostVector& y, double h);

// SPO+ (Elmachtoub & Grigas): -V(2t - y) + 2 t' pi(y) - V(y), subgradient
// 2 (pi(y) - pi(2t - y)). Convex in t.
LossEval SpoPlus(const Oracle& oracle, const CostVector& t, const CostVector& y);

// Same as SpoPlus with a precomputed pi(y) (training reuses it every epoch).
LossEval SpoPlus(const Oracle& oracle, const CostVector& t, const CostVector& y,
                 const OracleSolution& y_solution);

// 0.5 ||t - y||^2.
LossEval Mse(const CostVector& t, const CostVector& y);

// Dispatches on `kind`.
LossEval Evaluate(const LossKind& kind, const Oracle& oracle, const CostVector& t,
                  const CostVector& y);

}  // namespace pgopt

#endif  // PGOPT_LOSSES_H_
