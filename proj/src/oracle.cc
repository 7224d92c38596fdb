#include "pgopt/oracle.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pgopt {
namespace {

double OrderedDot(const CostVector& t, const DecisionVector& z) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < t.size(); ++j) sum += t[j] * z[j];
  return sum;
}

void CheckFinite(const CostVector& t) {
  for (Eigen::Index j = 0; j < t.size(); ++j) {
    if (!std::isfinite(t[j])) {
      throw std::invalid_argument("oracle: cost entry " + std::to_string(j) +
                                  " is not finite");
    }
  }
}

void CheckDim(const CostVector& t, int dim) {
  if (t.size() != dim) {
    throw std::invalid_argument("oracle: expected cost dimension " + std::to_string(dim) +
                                ", got " + std::to_string(t.size()));
  }
}

OracleSolution Finish(const CostVector& t, DecisionVector z) {
  const double value = OrderedDot(t, z);
  return {std::move(z), value};
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

std::string OracleKindName(OracleKind kind) {
  switch (kind) {
    case OracleKind::kBinary: return "binary";
    case OracleKind::kInterval: return "interval";
    case OracleKind::kGridPath: return "grid-path";
    case OracleKind::kCappedSimplex: return "capped-simplex";
    case OracleKind::kEnumerated: return "enumerated";
  }
  return "unknown";
}

int GridArcCount(int side) { return 2 * side * (side - 1); }

int RightArcIndex(int side, int row, int col) { return row * (side - 1) + col; }

int DownArcIndex(int side, int row, int col) {
  return side * (side - 1) + col * (side - 1) + row;
}

OracleSolution SolveBinary(const CostVector& t) {
  CheckFinite(t);
  DecisionVector z = DecisionVector::Zero(t.size());
  for (Eigen::Index j = 0; j < t.size(); ++j) {
    if (t[j] < 0.0) z[j] = 1.0;
  }
  return Finish(t, std::move(z));
}

OracleSolution SolveInterval(const CostVector& t) {
  CheckFinite(t);
  DecisionVector z(t.size());
  for (Eigen::Index j = 0; j < t.size(); ++j) z[j] = t[j] < 0.0 ? 1.0 : -1.0;
  return Finish(t, std::move(z));
}

OracleSolution SolveGridPath(const CostVector& t, int side) {
  if (side < 2) throw std::invalid_argument("grid-path: side must be >= 2");
  CheckDim(t, GridArcCount(side));
  CheckFinite(t);

  // cost_to_go[r*side+c] = cheapest cost from (r,c) to the sink; DAG order is
  // reverse row-major. At equal cost the right move wins.
  std::vector<double> cost_to_go(static_cast<size_t>(side * side), 0.0);
  std::vector<char> go_right(static_cast<size_t>(side * side), 0);
  for (int r = side - 1; r >= 0; --r) {
    for (int c = side - 1; c >= 0; --c) {
      if (r == side - 1 && c == side - 1) continue;
      const size_t node = static_cast<size_t>(r * side + c);
      const bool can_right = c < side - 1;
      const bool can_down = r < side - 1;
      double right = 0.0;
      double down = 0.0;
      if (can_right) right = t[RightArcIndex(side, r, c)] + cost_to_go[node + 1];
      if (can_down) down = t[DownArcIndex(side, r, c)] + cost_to_go[node + side];
      if (can_right && (!can_down || right <= down)) {
        cost_to_go[node] = right;
        go_right[node] = 1;
      } else {
        cost_to_go[node] = down;
      }
    }
  }

  DecisionVector z = DecisionVector::Zero(t.size());
  int r = 0;
  int c = 0;
  while (r != side - 1 || c != side - 1) {
    if (go_right[static_cast<size_t>(r * side + c)]) {
      z[RightArcIndex(side, r, c)] = 1.0;
      ++c;
    } else {
      z[DownArcIndex(side, r, c)] = 1.0;
      ++r;
    }
  }
  return Finish(t, std::move(z));
}

OracleSolution SolveCappedSimplex(const CostVector& t, double cap) {
  const auto dim = t.size();
  if (dim < 1) throw std::invalid_argument("capped-simplex: empty cost vector");
  if (!(cap > 0.0 && cap <= 1.0)) {
    throw std::invalid_argument("capped-simplex: cap must lie in (0, 1]");
  }
  if (static_cast<double>(dim) * cap < 1.0) {
    throw std::invalid_argument("capped-simplex: infeasible, dim * cap < 1");
  }
  CheckFinite(t);

  std::vector<Eigen::Index> order(static_cast<size_t>(dim));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&t](Eigen::Index a, Eigen::Index b) { return t[a] < t[b]; });

  DecisionVector z = DecisionVector::Zero(dim);
  double remaining = 1.0;
  for (Eigen::Index j : order) {
    if (remaining <= 0.0) break;
    if (remaining >= cap) {
      z[j] = cap;
      remaining -= cap;
    } else {
      z[j] = remaining;
      remaining = 0.0;
    }
  }
  return Finish(t, std::move(z));
}

OracleSolution SolveEnumerated(const std::vector<DecisionVector>& points,
                               const CostVector& t) {
  if (points.empty()) throw std::invalid_argument("enumerated: empty point list");
  CheckFinite(t);
  size_t best = 0;
  double best_value = 0.0;
  for (size_t i = 0; i < points.size(); ++i) {
    CheckDim(t, static_cast<int>(points[i].size()));
    const double value = OrderedDot(t, points[i]);
    if (i == 0 || value < best_value) {
      best = i;
      best_value = value;
    }
  }
  return {points[best], best_value};
}

std::vector<DecisionVector> EnumerateGridPaths(int side) {
  std::vector<DecisionVector> paths;
  const int steps = side - 1;
  // Depth-first over move strings, trying right before down.
  std::vector<int> moves;  // 1 = right, 0 = down
  auto recurse = [&](auto&& self, int rights, int downs) -> void {
    if (rights == steps && downs == steps) {
      DecisionVector z = DecisionVector::Zero(GridArcCount(side));
      int r = 0;
      int c = 0;
      for (int move : moves) {
        if (move) {
          z[RightArcIndex(side, r, c++)] = 1.0;
        } else {
          z[DownArcIndex(side, r++, c)] = 1.0;
        }
      }
      paths.push_back(std::move(z));
      return;
    }
    if (rights < steps) {
      moves.push_back(1);
      self(self, rights + 1, downs);
      moves.pop_back();
    }
    if (downs < steps) {
      moves.push_back(0);
      self(self, rights, downs + 1);
      moves.pop_back();
    }
  };
  recurse(recurse, 0, 0);
  return paths;
}

Oracle Oracle::Binary(int dim) {
  if (dim < 1) throw std::invalid_argument("binary: dim must be >= 1");
  return Oracle(BinaryRegion{dim}, dim);
}

Oracle Oracle::Interval(int dim) {
  if (dim < 1) throw std::invalid_argument("interval: dim must be >= 1");
  return Oracle(IntervalRegion{dim}, dim);
}

Oracle Oracle::GridPath(int side) {
  if (side < 2) throw std::invalid_argument("grid-path: side must be >= 2");
  return Oracle(GridPathRegion{side}, GridArcCount(side));
}

Oracle Oracle::CappedSimplex(int dim, double cap) {
  if (dim < 1) throw std::invalid_argument("capped-simplex: dim must be >= 1");
  if (!(cap > 0.0 && cap <= 1.0)) {
    throw std::invalid_argument("capped-simplex: cap must lie in (0, 1]");
  }
  if (dim * cap < 1.0) throw std::invalid_argument("capped-simplex: infeasible, dim * cap < 1");
  return Oracle(CappedSimplexRegion{dim, cap}, dim);
}

Oracle Oracle::Enumerated(std::vector<DecisionVector> points) {
  if (points.empty()) throw std::invalid_argument("enumerated: empty point list");
  const auto dim = points.front().size();
  if (dim < 1) throw std::invalid_argument("enumerated: zero-dimensional points");
  for (const auto& p : points) {
    if (p.size() != dim) throw std::invalid_argument("enumerated: inconsistent dimensions");
  }
  return Oracle(EnumeratedRegion{std::move(points)}, static_cast<int>(dim));
}

OracleKind Oracle::kind() const {
  return std::visit(Overloaded{
                        [](const BinaryRegion&) { return OracleKind::kBinary; },
                        [](const IntervalRegion&) { return OracleKind::kInterval; },
                        [](const GridPathRegion&) { return OracleKind::kGridPath; },
                        [](const CappedSimplexRegion&) { return OracleKind::kCappedSimplex; },
                        [](const EnumeratedRegion&) { return OracleKind::kEnumerated; },
                    },
                    region_);
}

OracleSolution Oracle::Solve(const CostVector& t) const {
  CheckDim(t, dim_);
  return std::visit(
      Overloaded{
          [&t](const BinaryRegion&) { return SolveBinary(t); },
          [&t](const IntervalRegion&) { return SolveInterval(t); },
          [&t](const GridPathRegion& g) { return SolveGridPath(t, g.side); },
          [&t](const CappedSimplexRegion& s) { return SolveCappedSimplex(t, s.cap); },
          [&t](const EnumeratedRegion& e) { return SolveEnumerated(e.points, t); },
      },
      region_);
}

double Oracle::DiameterBound() const {
  return std::visit(
      Overloaded{
          [](const BinaryRegion& b) { return std::sqrt(static_cast<double>(b.dim)); },
          [](const IntervalRegion& b) { return std::sqrt(static_cast<double>(b.dim)); },
          [](const GridPathRegion& g) { return std::sqrt(2.0 * (g.side - 1)); },
          [](const CappedSimplexRegion& s) {
            // The greedy vertex (full caps then one remainder) maximizes the
            // norm over the polytope.
            CostVector ramp(s.dim);
            for (int j = 0; j < s.dim; ++j) ramp[j] = j;
            return SolveCappedSimplex(ramp, s.cap).decision.norm();
          },
          [](const EnumeratedRegion& e) {
            double best = 0.0;
            for (const auto& p : e.points) best = std::max(best, p.norm());
            return best;
          },
      },
      region_);
}

bool Oracle::IsFeasible(const DecisionVector& z, double tol) const {
  if (z.size() != dim_) return false;
  return std::visit(
      Overloaded{
          [&z](const BinaryRegion&) {
            return (z.array() == 0.0 || z.array() == 1.0).all();
          },
          [&z, tol](const IntervalRegion&) {
            return (z.array() >= -1.0 - tol && z.array() <= 1.0 + tol).all();
          },
          [&z](const GridPathRegion& g) {
            if (!(z.array() == 0.0 || z.array() == 1.0).all()) return false;
            // Walk from the source; exactly one outgoing arc at every visited
            // non-sink node and nothing else used.
            int r = 0;
            int c = 0;
            int used = 0;
            const int side = g.side;
            while (r != side - 1 || c != side - 1) {
              const bool right = c < side - 1 && z[RightArcIndex(side, r, c)] == 1.0;
              const bool down = r < side - 1 && z[DownArcIndex(side, r, c)] == 1.0;
              if (right == down) return false;
              ++used;
              if (right) {
                ++c;
              } else {
                ++r;
              }
            }
            return used == 2 * (side - 1) && z.sum() == used;
          },
          [&z, tol](const CappedSimplexRegion& s) {
            return (z.array() >= -tol && z.array() <= s.cap + tol).all() &&
                   std::abs(z.sum() - 1.0) <= tol;
          },
          [&z](const EnumeratedRegion& e) {
            return std::any_of(e.points.begin(), e.points.end(),
                               [&z](const DecisionVector& p) { return p == z; });
          },
      },
      region_);
}

}  // namespace pgopt
