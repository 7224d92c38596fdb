#ifndef PGOPT_DATAGEN_H_
#define PGOPT_DATAGEN_H_

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "Eigen/Core"

namespace pgopt {

// n samples: contexts X (n x p), realized costs Y (n x d) and, for synthetic
// data, the true conditional means f*(X) (n x d).
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::MatrixXd Y;
  std::optional<Eigen::MatrixXd> f_star;

  int size() const { return static_cast<int>(X.rows()); }
  int context_dim() const { return static_cast<int>(X.cols()); }
  int cost_dim() const { return static_cast<int>(Y.cols()); }

  // Rows [begin, begin + count).
  Dataset Slice(int begin, int count) const;

  bool operator==(const Dataset&) const = default;
};

// Stacks b below a; both must agree on widths and on f_star presence.
Dataset Concat(const Dataset& a, const Dataset& b);

// splitmix64 finalizer applied to (a, b); used for every derived seed.
uint64_t MixSeed(uint64_t a, uint64_t b);

// eps = sqrt(alpha) (zeta - 0.5) + sqrt(1 - alpha) gamma, zeta ~ Exp(mean 0.5),
// gamma ~ N(0, 0.25). `scale` multiplies the draw (1 keeps variance 0.25).
struct AsymmetricNoise {
  double alpha = 1.0;
  double scale = 1.0;
};
// Y_j = f*_j (1 + eps_j), eps_j ~ Unif[-half_width, half_width].
struct MultUniformNoise {
  double half_width = 0.3;
};
// Y_j = f*_j + eps_j, eps_j ~ N(0, sigma^2).
struct AddGaussianNoise {
  double sigma = 0.3;
};
using NoiseSpec = std::variant<AsymmetricNoise, MultUniformNoise, AddGaussianNoise>;

// Parses "mult-uniform" or "add-gaussian".
NoiseSpec ParseArcNoise(const std::string& name);
std::string NoiseName(const NoiseSpec& noise);

// --- simple misspecification (p = d = 1, Z = {0,1}) ---

// f*(x) = -4x + 2 on [0, 0.55), m (x - 0.55) - 0.2 on [0.55, 2].
double SimpleMisspecMean(double x, double m);

Dataset GenSimpleMisspec(int n, double m, double alpha, uint64_t seed, double noise_scale = 1.0);

// --- shortest path on the 5x5 grid (d = 40) ---

inline constexpr int kGridArcs = 40;
inline constexpr int kShortestPathFeatures = 5;
inline constexpr double kPlantedShift = 2.2;

// 40 x 5 matrix with i.i.d. Bernoulli(0.5) entries, a pure function of the seed.
Eigen::MatrixXd MakeBStar(uint64_t bstar_seed);

// f*_j(x) = ((B* x)_j / sqrt(5) + 3)^6 + 1) / 3.5^6 over the first 5 features.
Eigen::VectorXd ShortestPathMean(const Eigen::MatrixXd& bstar, const Eigen::VectorXd& x);

Dataset GenShortestPath(int n, const NoiseSpec& noise, uint64_t seed, uint64_t bstar_seed);

// Planted paths. Red (safe): right arcs of row 0 then down arcs of column 4.
// Blue (risky): down arcs of column 0 then right arcs of row 4.
std::vector<int> PlantedRedArcs();
std::vector<int> PlantedBlueArcs();

// Means for the planted instance; x has 6 features, x[5] in [0, 2].
Eigen::VectorXd PlantedPathMean(const Eigen::MatrixXd& bstar, const Eigen::VectorXd& x);

Dataset GenPlantedPath(int n, const NoiseSpec& noise, uint64_t seed, uint64_t bstar_seed);

// --- portfolio (p = d = 12) ---

struct ReturnsCsvOptions {
  int columns = 12;
  int min_rows = 24;
  bool in_percent = false;  // divide every entry by 100
};

// Header row then numeric rows; chronological order is kept. Errors name
// the offending line.
Eigen::MatrixXd LoadReturnsCsv(const std::string& path, const ReturnsCsvOptions& options = {});
void WriteReturnsCsv(const Eigen::MatrixXd& returns, const std::string& path);

// Sample covariance (denominator T - 1) of the rows.
Eigen::MatrixXd SampleCovariance(const Eigen::MatrixXd& rows);

// Symmetric square root via eigendecomposition. Eigenvalues that are only
// slightly negative (>= -1e-10 * max |lambda|) are clamped to zero; anything
// more negative throws.
Eigen::MatrixXd SymmetricSqrt(const Eigen::MatrixXd& sigma);

// Number of (X, Y) pairs a T-row return history yields once lagged.
inline int LaggedPairCount(const Eigen::MatrixXd& returns) {
  return returns.rows() > 0 ? static_cast<int>(returns.rows()) - 1 : 0;
}

// Each sample draws a month t >= 1 uniformly: Y = -r_t, X = r_{t-1} + eta,
// eta ~ N(0, noise_scale * Sigma) with Sigma the sample covariance of the
// returns. f_star is absent.
Dataset GenPortfolio(const Eigen::MatrixXd& returns, int n, double noise_scale, uint64_t seed);

// 12-asset monthly return history used when no CSV is supplied: a VAR(1)
// with heavy-tailed, regime-scaled innovations around a fixed factor
// covariance. Deterministic in seed.
Eigen::MatrixXd SyntheticReturns(int months = 121, uint64_t seed = 20240101);

// X columns, then Y columns, then f* columns (if any), with a header row.
void WriteDatasetCsv(const Dataset& data, const std::string& path);

}  // namespace pgopt

#endif  // PGOPT_DATAGEN_H_
