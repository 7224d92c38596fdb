#include "pgopt/losses.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pgopt {
namespace {

void CheckDims(const CostVector& t, const CostVector& y) {
  if (t.size() != y.size()) {
    throw std::invalid_argument("loss: t has dimension " + std::to_string(t.size()) +
                                " but y has " + std::to_string(y.size()));
  }
}

void CheckH(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw std::invalid_argument("loss: perturbation h must be positive and finite");
  }
}

// (V(t + a h y) - V(t + b h y)) / ((a - b) h) from the two minimizers za, zb.
// Expanding V(t + c h y) = t'z + c h y'z keeps the t-terms out of the
// subtraction unless the decisions differ, which avoids cancellation at
// small h and makes the quotient exact when za == zb.
double DifferenceQuotient(const CostVector& t, const CostVector& y, double h, double a,
                          const DecisionVector& za, double b, const DecisionVector& zb) {
  const double cross = (za == zb) ? 0.0 : t.dot(za - zb) / h;
  return (cross + a * y.dot(za) - b * y.dot(zb)) / (a - b);
}

}  // namespace

std::string LossTagName(LossTag tag) {
  switch (tag) {
    case LossTag::kDecision: return "decision";
    case LossTag::kPgb: return "pgb";
    case LossTag::kPgc: return "pgc";
    case LossTag::kPgf: return "pgf";
    case LossTag::kSpoPlus: return "spo-plus";
    case LossTag::kMse: return "mse";
  }
  return "unknown";
}

LossKind LossKind::Pg(LossTag tag, double h) {
  if (!IsPgTag(tag)) throw std::invalid_argument("LossKind: " + LossTagName(tag) + " takes no h");
  CheckH(h);
  return LossKind(tag, h);
}

LossKind LossKind::Parse(const std::string& name, std::optional<double> h) {
  for (LossTag tag : {LossTag::kDecision, LossTag::kPgb, LossTag::kPgc, LossTag::kPgf,
                      LossTag::kSpoPlus, LossTag::kMse}) {
    if (LossTagName(tag) != name) continue;
    if (IsPgTag(tag)) {
      if (h) CheckH(*h);
      return LossKind(tag, h);
    }
    if (h) throw std::invalid_argument("LossKind: " + name + " takes no h");
    return LossKind(tag, std::nullopt);
  }
  throw std::invalid_argument("LossKind: unknown loss '" + name + "'");
}

std::string LossKind::name() const { return LossTagName(tag_); }

LossEval DecisionLoss(const Oracle& oracle, const CostVector& t, const CostVector& y) {
  CheckDims(t, y);
  const OracleSolution sol = oracle.Solve(t);
  return {y.dot(sol.decision), Eigen::VectorXd::Zero(t.size())};
}

LossEval Pgb(const Oracle& oracle, const CostVector& t, const CostVector& y, double h) {
  CheckDims(t, y);
  CheckH(h);
  const OracleSolution at = oracle.Solve(t);
  const OracleSolution behind = oracle.Solve(t - h * y);
  return {DifferenceQuotient(t, y, h, 0.0, at.decision, -1.0, behind.decision),
          (at.decision - behind.decision) / h};
}

LossEval Pgc(const Oracle& oracle, const CostVector& t, const CostVector& y, double h) {
  CheckDims(t, y);
  CheckH(h);
  const OracleSolution ahead = oracle.Solve(t + h * y);
  const OracleSolution behind = oracle.Solve(t - h * y);
  return {DifferenceQuotient(t, y, h, 1.0, ahead.decision, -1.0, behind.decision),
          (ahead.decision - behind.decision) / (2.0 * h)};
}

LossEval Pgf(const Oracle& oracle, const CostVector& t, const CostVector& y, double h) {
  CheckDims(t, y);
  CheckH(h);
  const OracleSolution ahead = oracle.Solve(t + h * y);
  const OracleSolution at = oracle.Solve(t);
  return {DifferenceQuotient(t, y, h, 1.0, ahead.decision, 0.0, at.decision),
          (ahead.decision - at.decision) / h};
}

LossEval SpoPlus(const Oracle& oracle, const CostVector& t, const CostVector& y,
                 const OracleSolution& y_solution) {
  CheckDims(t, y);
  const OracleSolution shifted = oracle.Solve(2.0 * t - y);
  const double value = -shifted.value + 2.0 * t.dot(y_solution.decision) - y_solution.value;
  return {value, 2.0 * (y_solution.decision - shifted.decision)};
}

LossEval SpoPlus(const Oracle& oracle, const CostVector& t, const CostVector& y) {
  CheckDims(t, y);
  return SpoPlus(oracle, t, y, oracle.Solve(y));
}

LossEval Mse(const CostVector& t, const CostVector& y) {
  CheckDims(t, y);
  Eigen::VectorXd diff = t - y;
  return {0.5 * diff.squaredNorm(), std::move(diff)};
}

LossEval Evaluate(const LossKind& kind, const Oracle& oracle, const CostVector& t,
                  const CostVector& y) {
  auto need_h = [&kind]() {
    if (!kind.h()) throw std::invalid_argument("loss: " + kind.name() + " requires h");
    return *kind.h();
  };
  switch (kind.tag()) {
    case LossTag::kDecision: return DecisionLoss(oracle, t, y);
    case LossTag::kPgb: return Pgb(oracle, t, y, need_h());
    case LossTag::kPgc: return Pgc(oracle, t, y, need_h());
    case LossTag::kPgf: return Pgf(oracle, t, y, need_h());
    case LossTag::kSpoPlus: return SpoPlus(oracle, t, y);
    case LossTag::kMse: return Mse(t, y);
  }
  throw std::logic_error("loss: unhandled tag");
}

}  // namespace pgopt
