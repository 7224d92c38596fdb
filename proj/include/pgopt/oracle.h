#ifndef PGOPT_ORACLE_H_
#define PGOPT_ORACLE_H_

#include <string>
#include <variant>
#include <vector>

#include "Eigen/Core"

namespace pgopt {

// Predicted or realized cost vector (t or y). For portfolio problems the
// entries are negated returns.
using CostVector = Eigen::VectorXd;
// A point z of the feasible region.
using DecisionVector = Eigen::VectorXd;

// Result of the plug-in problem min_{z in Z} t'z.
struct OracleSolution {
  DecisionVector decision;
  double value = 0.0;  // dot(t, decision)
};

enum class OracleKind { kBinary, kInterval, kGridPath, kCappedSimplex, kEnumerated };

std::string OracleKindName(OracleKind kind);

// Z = {0,1}^dim.
struct BinaryRegion {
  int dim = 1;
};

// Z = [-1,1]^dim.
struct IntervalRegion {
  int dim = 1;
};

// Monotone (right/down) paths from the top-left to the bottom-right node of a
// side x side grid. Arc layout: the side*(side-1) right-going arcs come first,
// row-major (row r, column c -> r*(side-1)+c); then the down-going arcs,
// column-major (column c, row r -> side*(side-1) + c*(side-1)+r).
struct GridPathRegion {
  int side = 5;
};

// Z = {z : 0 <= z_j <= cap, sum_j z_j = 1}.
struct CappedSimplexRegion {
  int dim = 1;
  double cap = 1.0;
};

// Z = conv(points); the oracle searches the explicit list.
struct EnumeratedRegion {
  std::vector<DecisionVector> points;
};

// Deterministic linear-optimization oracle over one of the supported regions.
// Every Solve() is a pure function of its input; instances can be shared
// across threads.
class Oracle {
 public:
  static Oracle Binary(int dim = 1);
  static Oracle Interval(int dim = 1);
  static Oracle GridPath(int side = 5);
  static Oracle CappedSimplex(int dim, double cap);
  static Oracle Enumerated(std::vector<DecisionVector> points);

  OracleKind kind() const;
  int dim() const { return dim_; }

  // Returns the tie-broken minimizer of t'z and its value. Throws
  // std::invalid_argument on a dimension mismatch or a non-finite entry.
  OracleSolution Solve(const CostVector& t) const;
  // V(t) = min_{z in Z} t'z.
  double Value(const CostVector& t) const { return Solve(t).value; }

  // B = max_{z in Z} ||z||_2.
  double DiameterBound() const;

  // Membership test for Z; `tol` is ignored by the combinatorial regions,
  // which require exact 0/1 patterns.
  bool IsFeasible(const DecisionVector& z, double tol = 1e-9) const;

 private:
  using Region = std::variant<BinaryRegion, IntervalRegion, GridPathRegion,
                              CappedSimplexRegion, EnumeratedRegion>;
  Oracle(Region region, int dim) : region_(std::move(region)), dim_(dim) {}

  Region region_;
  int dim_;
};

// Stand-alone solvers. All of them return value = dot(t, decision) summed in
// coordinate order.
OracleSolution SolveBinary(const CostVector& t);
OracleSolution SolveInterval(const CostVector& t);
OracleSolution SolveGridPath(const CostVector& t, int side = 5);
OracleSolution SolveCappedSimplex(const CostVector& t, double cap);
OracleSolution SolveEnumerated(const std::vector<DecisionVector>& points,
                               const CostVector& t);

// Number of arcs of a side x side grid, 2*side*(side-1).
int GridArcCount(int side);
int RightArcIndex(int side, int row, int col);
int DownArcIndex(int side, int row, int col);

// Incidence vectors of every monotone path, in lexicographic order of their
// move strings with 'R' < 'D' (so the all-rights-then-downs path is first).
std::vector<DecisionVector> EnumerateGridPaths(int side = 5);

}  // namespace pgopt

#endif  // PGOPT_ORACLE_H_
