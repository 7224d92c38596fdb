#include "pgopt/datagen.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "Eigen/Eigenvalues"
#include "pgopt/oracle.h"

namespace pgopt {
namespace {

constexpr double kSimpleNoiseSd = 0.5;  // gamma ~ N(0, 0.25)
constexpr double kExpMean = 0.5;

std::string Trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> SplitComma(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(Trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

bool ParseDouble(const std::string& text, double& out) {
  if (text.empty()) return false;
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return end == text.c_str() + text.size() && std::isfinite(out);
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Eigen::VectorXd ApplyArcNoise(const NoiseSpec& noise, const Eigen::VectorXd& mean,
                              std::mt19937_64& rng) {
  Eigen::VectorXd y = mean;
  if (const auto* mult = std::get_if<MultUniformNoise>(&noise)) {
    std::uniform_real_distribution<double> unif(-mult->half_width, mult->half_width);
    for (Eigen::Index j = 0; j < y.size(); ++j) y[j] = mean[j] * (1.0 + unif(rng));
  } else if (const auto* add = std::get_if<AddGaussianNoise>(&noise)) {
    std::normal_distribution<double> normal(0.0, add->sigma);
    for (Eigen::Index j = 0; j < y.size(); ++j) y[j] = mean[j] + normal(rng);
  } else {
    throw std::invalid_argument("arc noise must be mult-uniform or add-gaussian");
  }
  return y;
}

double BaseArcMean(const Eigen::MatrixXd& bstar, const Eigen::VectorXd& x, int arc) {
  double proj = 0.0;
  for (int k = 0; k < kShortestPathFeatures; ++k) proj += bstar(arc, k) * x[k];
  const double inner = proj / std::sqrt(5.0) + 3.0;
  return (std::pow(inner, 6) + 1.0) / std::pow(3.5, 6);
}

}  // namespace

Dataset Dataset::Slice(int begin, int count) const {
  if (begin < 0 || count < 0 || begin + count > size()) {
    throw std::out_of_range("dataset slice out of range");
  }
  Dataset out{X.middleRows(begin, count), Y.middleRows(begin, count), std::nullopt};
  if (f_star) out.f_star = f_star->middleRows(begin, count);
  return out;
}

Dataset Concat(const Dataset& a, const Dataset& b) {
  if (a.X.cols() != b.X.cols() || a.Y.cols() != b.Y.cols() ||
      a.f_star.has_value() != b.f_star.has_value()) {
    throw std::invalid_argument("concat: incompatible datasets");
  }
  Dataset out;
  out.X.resize(a.X.rows() + b.X.rows(), a.X.cols());
  out.X << a.X, b.X;
  out.Y.resize(a.Y.rows() + b.Y.rows(), a.Y.cols());
  out.Y << a.Y, b.Y;
  if (a.f_star) {
    Eigen::MatrixXd f(a.f_star->rows() + b.f_star->rows(), a.f_star->cols());
    f << *a.f_star, *b.f_star;
    out.f_star = std::move(f);
  }
  return out;
}

uint64_t MixSeed(uint64_t a, uint64_t b) {
  uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

NoiseSpec ParseArcNoise(const std::string& name) {
  if (name == "mult-uniform") return MultUniformNoise{};
  if (name == "add-gaussian") return AddGaussianNoise{};
  throw std::invalid_argument("unknown noise kind '" + name +
                              "' (expected mult-uniform or add-gaussian)");
}

std::string NoiseName(const NoiseSpec& noise) {
  if (std::holds_alternative<MultUniformNoise>(noise)) return "mult-uniform";
  if (std::holds_alternative<AddGaussianNoise>(noise)) return "add-gaussian";
  return "asymmetric";
}

double SimpleMisspecMean(double x, double m) {
  if (x < 0.55) return -4.0 * x + 2.0;
  return m * (x - 0.55) - 0.2;
}

Dataset GenSimpleMisspec(int n, double m, double alpha, uint64_t seed, double noise_scale) {
  if (n < 1) throw std::invalid_argument("simple-misspec: n must be >= 1");
  if (!(m >= -4.0 && m <= 0.0)) throw std::invalid_argument("simple-misspec: m must lie in [-4, 0]");
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("simple-misspec: alpha must lie in [0, 1]");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 2.0);
  std::exponential_distribution<double> expo(1.0 / kExpMean);
  std::normal_distribution<double> normal(0.0, kSimpleNoiseSd);

  Dataset data{Eigen::MatrixXd(n, 1), Eigen::MatrixXd(n, 1), Eigen::MatrixXd(n, 1)};
  const double wa = std::sqrt(alpha);
  const double wg = std::sqrt(1.0 - alpha);
  for (int i = 0; i < n; ++i) {
    const double x = unif(rng);
    const double zeta = expo(rng);
    const double gamma = normal(rng);
    const double eps = noise_scale * (wa * (zeta - kExpMean) + wg * gamma);
    const double mean = SimpleMisspecMean(x, m);
    data.X(i, 0) = x;
    (*data.f_star)(i, 0) = mean;
    data.Y(i, 0) = mean + eps;
  }
  return data;
}

Eigen::MatrixXd MakeBStar(uint64_t bstar_seed) {
  std::mt19937_64 rng(MixSeed(bstar_seed, 0xb57a));
  std::bernoulli_distribution coin(0.5);
  Eigen::MatrixXd bstar(kGridArcs, kShortestPathFeatures);
  for (int i = 0; i < kGridArcs; ++i) {
    for (int k = 0; k < kShortestPathFeatures; ++k) bstar(i, k) = coin(rng) ? 1.0 : 0.0;
  }
  return bstar;
}

Eigen::VectorXd ShortestPathMean(const Eigen::MatrixXd& bstar, const Eigen::VectorXd& x) {
  if (x.size() < kShortestPathFeatures || bstar.cols() != kShortestPathFeatures) {
    throw std::invalid_argument("shortest-path mean: expected 5 leading features");
  }
  Eigen::VectorXd f(bstar.rows());
  for (int j = 0; j < bstar.rows(); ++j) f[j] = BaseArcMean(bstar, x, j);
  return f;
}

Dataset GenShortestPath(int n, const NoiseSpec& noise, uint64_t seed, uint64_t bstar_seed) {
  if (n < 1) throw std::invalid_argument("shortest-path: n must be >= 1");
  const Eigen::MatrixXd bstar = MakeBStar(bstar_seed);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset data{Eigen::MatrixXd(n, kShortestPathFeatures), Eigen::MatrixXd(n, kGridArcs),
               Eigen::MatrixXd(n, kGridArcs)};
  Eigen::VectorXd x(kShortestPathFeatures);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < kShortestPathFeatures; ++k) x[k] = normal(rng);
    const Eigen::VectorXd mean = ShortestPathMean(bstar, x);
    data.X.row(i) = x.transpose();
    data.f_star->row(i) = mean.transpose();
    data.Y.row(i) = ApplyArcNoise(noise, mean, rng).transpose();
  }
  return data;
}

std::vector<int> PlantedRedArcs() {
  std::vector<int> arcs;
  for (int c = 0; c < 4; ++c) arcs.push_back(RightArcIndex(5, 0, c));
  for (int r = 0; r < 4; ++r) arcs.push_back(DownArcIndex(5, r, 4));
  return arcs;
}

std::vector<int> PlantedBlueArcs() {
  std::vector<int> arcs;
  for (int r = 0; r < 4; ++r) arcs.push_back(DownArcIndex(5, r, 0));
  for (int c = 0; c < 4; ++c) arcs.push_back(RightArcIndex(5, 4, c));
  return arcs;
}

Eigen::VectorXd PlantedPathMean(const Eigen::MatrixXd& bstar, const Eigen::VectorXd& x) {
  if (x.size() != kShortestPathFeatures + 1) {
    throw std::invalid_argument("planted-path mean: expected 6 features");
  }
  Eigen::VectorXd f = ShortestPathMean(bstar, x).array() + kPlantedShift;
  const double x6 = x[kShortestPathFeatures];
  const double blue = (x6 >= 0.0 && x6 <= 0.55) ? 4.0 * x6 : kPlantedShift;
  for (int arc : PlantedRedArcs()) f[arc] = 2.0;
  for (int arc : PlantedBlueArcs()) f[arc] = blue;
  return f;
}

Dataset GenPlantedPath(int n, const NoiseSpec& noise, uint64_t seed, uint64_t bstar_seed) {
  if (n < 1) throw std::invalid_argument("planted-path: n must be >= 1");
  const Eigen::MatrixXd bstar = MakeBStar(bstar_seed);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 2.0);
  const int p = kShortestPathFeatures + 1;
  Dataset data{Eigen::MatrixXd(n, p), Eigen::MatrixXd(n, kGridArcs),
               Eigen::MatrixXd(n, kGridArcs)};
  Eigen::VectorXd x(p);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < kShortestPathFeatures; ++k) x[k] = normal(rng);
    x[kShortestPathFeatures] = unif(rng);
    const Eigen::VectorXd mean = PlantedPathMean(bstar, x);
    data.X.row(i) = x.transpose();
    data.f_star->row(i) = mean.transpose();
    data.Y.row(i) = ApplyArcNoise(noise, mean, rng).transpose();
  }
  return data;
}

Eigen::MatrixXd LoadReturnsCsv(const std::string& path, const ReturnsCsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("returns csv: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("returns csv: '" + path + "' is empty");
  const auto header = SplitComma(line);
  if (static_cast<int>(header.size()) != options.columns) {
    throw std::runtime_error("returns csv: header has " + std::to_string(header.size()) +
                             " columns, expected " + std::to_string(options.columns));
  }
  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const auto fields = SplitComma(line);
    if (static_cast<int>(fields.size()) != options.columns) {
      throw std::runtime_error("returns csv: line " + std::to_string(line_no) + " has " +
                               std::to_string(fields.size()) + " columns, expected " +
                               std::to_string(options.columns));
    }
    std::vector<double> row(fields.size());
    for (size_t k = 0; k < fields.size(); ++k) {
      if (!ParseDouble(fields[k], row[k])) {
        throw std::runtime_error("returns csv: line " + std::to_string(line_no) + ", column " +
                                 std::to_string(k + 1) + ": malformed number '" + fields[k] +
                                 "'");
      }
      if (options.in_percent) row[k] /= 100.0;
    }
    rows.push_back(std::move(row));
  }
  if (static_cast<int>(rows.size()) < options.min_rows) {
    throw std::runtime_error("returns csv: " + std::to_string(rows.size()) +
                             " data rows, need at least " + std::to_string(options.min_rows));
  }
  Eigen::MatrixXd returns(static_cast<Eigen::Index>(rows.size()), options.columns);
  for (size_t i = 0; i < rows.size(); ++i) {
    for (int k = 0; k < options.columns; ++k) returns(static_cast<Eigen::Index>(i), k) = rows[i][static_cast<size_t>(k)];
  }
  return returns;
}

void WriteReturnsCsv(const Eigen::MatrixXd& returns, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  for (Eigen::Index k = 0; k < returns.cols(); ++k) {
    out << (k ? "," : "") << "asset" << (k + 1);
  }
  out << '\n';
  for (Eigen::Index i = 0; i < returns.rows(); ++i) {
    for (Eigen::Index k = 0; k < returns.cols(); ++k) {
      out << (k ? "," : "") << FormatDouble(returns(i, k));
    }
    out << '\n';
  }
}

Eigen::MatrixXd SampleCovariance(const Eigen::MatrixXd& rows) {
  if (rows.rows() < 2) throw std::invalid_argument("covariance: need at least 2 rows");
  const Eigen::RowVectorXd mean = rows.colwise().mean();
  const Eigen::MatrixXd centered = rows.rowwise() - mean;
  return centered.transpose() * centered / static_cast<double>(rows.rows() - 1);
}

Eigen::MatrixXd SymmetricSqrt(const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != sigma.cols()) throw std::invalid_argument("sqrt: matrix is not square");
  const Eigen::MatrixXd sym = 0.5 * (sigma + sigma.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success) throw std::runtime_error("sqrt: eigendecomposition failed");
  Eigen::VectorXd lambda = eig.eigenvalues();
  const double scale = lambda.cwiseAbs().maxCoeff();
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    if (lambda[k] < -1e-10 * scale) {
      throw std::runtime_error("covariance is not positive semidefinite (eigenvalue " +
                               FormatDouble(lambda[k]) + ")");
    }
    lambda[k] = std::sqrt(std::max(lambda[k], 0.0));
  }
  return eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
}

Dataset GenPortfolio(const Eigen::MatrixXd& returns, int n, double noise_scale, uint64_t seed) {
  if (returns.rows() < 2) throw std::invalid_argument("portfolio: need at least 2 return rows");
  if (n < 1) throw std::invalid_argument("portfolio: n must be >= 1");
  if (!(noise_scale >= 0.0)) throw std::invalid_argument("portfolio: noise_scale must be >= 0");
  const Eigen::MatrixXd root = std::sqrt(noise_scale) * SymmetricSqrt(SampleCovariance(returns));
  const auto assets = returns.cols();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Eigen::Index> month(1, returns.rows() - 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset data{Eigen::MatrixXd(n, assets), Eigen::MatrixXd(n, assets), std::nullopt};
  Eigen::VectorXd g(assets);
  for (int i = 0; i < n; ++i) {
    const Eigen::Index t = month(rng);
    for (Eigen::Index k = 0; k < assets; ++k) g[k] = normal(rng);
    data.Y.row(i) = -returns.row(t);
    if (noise_scale == 0.0) {
      data.X.row(i) = returns.row(t - 1);
    } else {
      data.X.row(i) = returns.row(t - 1) + (root * g).transpose();
    }
  }
  return data;
}

Eigen::MatrixXd SyntheticReturns(int months, uint64_t seed) {
  constexpr int kAssets = 12;
  if (months < 2) throw std::invalid_argument("synthetic returns: months must be >= 2");

  // Innovation covariance: one market factor, three 4-asset sector factors,
  // idiosyncratic noise.
  Eigen::MatrixXd loadings = Eigen::MatrixXd::Zero(kAssets, 4);
  Eigen::VectorXd idio(kAssets);
  Eigen::VectorXd mu(kAssets);
  for (int j = 0; j < kAssets; ++j) {
    loadings(j, 0) = 0.035 * (0.7 + 0.05 * j);
    loadings(j, 1 + j / 4) = 0.02;
    idio[j] = 0.02 + 0.002 * (j % 4);
    mu[j] = 0.004 + 0.0005 * j;
  }
  const Eigen::MatrixXd innovation_cov =
      loadings * loadings.transpose() + Eigen::MatrixXd(idio.cwiseAbs2().asDiagonal());
  const Eigen::MatrixXd root = SymmetricSqrt(innovation_cov);

  // Lead-lag transition: own-asset reversal plus a momentum spillover from
  // the neighbouring asset within each sector.
  Eigen::MatrixXd transition = Eigen::MatrixXd::Zero(kAssets, kAssets);
  for (int j = 0; j < kAssets; ++j) {
    transition(j, j) = -0.15;
    const int neighbour = (j / 4) * 4 + (j + 1) % 4;
    transition(j, neighbour) = 0.35;
  }

  // Innovations are multivariate Student-t (4 degrees of freedom, rescaled to
  // the factor covariance) with a persistent calm/turbulent volatility state.
  constexpr double kDof = 4.0;
  constexpr double kTurbulentScale = 2.0;
  constexpr double kStayProbability = 0.9;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::chi_squared_distribution<double> chi2(kDof);
  std::bernoulli_distribution stay(kStayProbability);
  const double t_rescale = std::sqrt((kDof - 2.0) / kDof);
  Eigen::MatrixXd returns(months, kAssets);
  Eigen::VectorXd prev = mu;
  Eigen::VectorXd g(kAssets);
  bool turbulent = false;
  // Burn-in so the first kept row is drawn from (near) the stationary law.
  for (int i = -50; i < months; ++i) {
    if (!stay(rng)) turbulent = !turbulent;
    for (int k = 0; k < kAssets; ++k) g[k] = normal(rng);
    const double mix = t_rescale / std::sqrt(chi2(rng) / kDof);
    const double vol = turbulent ? kTurbulentScale : 1.0;
    Eigen::VectorXd next = mu + transition * (prev - mu) + (vol * mix) * (root * g);
    if (i >= 0) returns.row(i) = next.transpose();
    prev = std::move(next);
  }
  return returns;
}

void WriteDatasetCsv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  std::vector<std::string> header;
  for (int k = 0; k < data.context_dim(); ++k) header.push_back("x" + std::to_string(k + 1));
  for (int k = 0; k < data.cost_dim(); ++k) header.push_back("y" + std::to_string(k + 1));
  if (data.f_star) {
    for (int k = 0; k < data.cost_dim(); ++k) header.push_back("fstar" + std::to_string(k + 1));
  }
  for (size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
  out << '\n';
  for (int i = 0; i < data.size(); ++i) {
    bool first = true;
    auto emit = [&](double v) {
      out << (first ? "" : ",") << FormatDouble(v);
      first = false;
    };
    for (int k = 0; k < data.context_dim(); ++k) emit(data.X(i, k));
    for (int k = 0; k < data.cost_dim(); ++k) emit(data.Y(i, k));
    if (data.f_star) {
      for (int k = 0; k < data.cost_dim(); ++k) emit((*data.f_star)(i, k));
    }
    out << '\n';
  }
}

}  // namespace pgopt
