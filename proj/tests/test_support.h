#ifndef PGOPT_TESTS_TEST_SUPPORT_H_
#define PGOPT_TESTS_TEST_SUPPORT_H_

// Reference implementations used only by the tests. They share no code with
// the library: paths and polytope vertices are enumerated from scratch.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "Eigen/Core"

namespace pgopt::testing {

// Arc index of a right move out of node (r, c) on a 5x5 grid: the 20 right
// arcs first, row-major; then the 20 down arcs, column-major.
inline int RefRightArc(int r, int c) { return r * 4 + c; }
inline int RefDownArc(int r, int c) { return 20 + c * 4 + r; }

// All 70 monotone paths as 0/1 incidence vectors, built from every move
// string with four 'R' and four 'D'.
inline std::vector<Eigen::VectorXd> RefAllPaths() {
  std::vector<Eigen::VectorXd> paths;
  std::string moves = "DDDDRRRR";  // sorted, so next_permutation visits all
  do {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(40);
    int r = 0, c = 0;
    for (char m : moves) {
      if (m == 'R') {
        z[RefRightArc(r, c)] = 1.0;
        ++c;
      } else {
        z[RefDownArc(r, c)] = 1.0;
        ++r;
      }
    }
    paths.push_back(z);
  } while (std::next_permutation(moves.begin(), moves.end()));
  return paths;
}

inline double RefDot(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double RefMinOver(const std::vector<Eigen::VectorXd>& points, const Eigen::VectorXd& t) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& z : points) best = std::min(best, RefDot(t, z));
  return best;
}

// Vertices of {0 <= z <= cap, sum z = 1}: every coordinate but one sits at a
// bound, and the remaining one takes whatever is left if that lies in [0, cap].
inline std::vector<Eigen::VectorXd> RefCappedSimplexVertices(int d, double cap) {
  std::vector<Eigen::VectorXd> out;
  for (int free = 0; free < d; ++free) {
    for (int mask = 0; mask < (1 << d); ++mask) {
      if (mask & (1 << free)) continue;
      Eigen::VectorXd z = Eigen::VectorXd::Zero(d);
      double used = 0.0;
      for (int j = 0; j < d; ++j) {
        if (j != free && (mask & (1 << j))) {
          z[j] = cap;
          used += cap;
        }
      }
      const double rest = 1.0 - used;
      if (rest < -1e-12 || rest > cap + 1e-12) continue;
      z[free] = std::clamp(rest, 0.0, cap);
      out.push_back(z);
    }
  }
  return out;
}

inline Eigen::VectorXd UniformVector(int d, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v[i] = u(rng);
  return v;
}

// Uniform direction scaled to a radius drawn from [0, max_norm].
inline Eigen::VectorXd BallVector(int d, double max_norm, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v[i] = g(rng);
  const double norm = v.norm();
  if (norm == 0.0) return v;
  return v * (max_norm * u(rng) / norm);
}

}  // namespace pgopt::testing

#endif  // PGOPT_TESTS_TEST_SUPPORT_H_
