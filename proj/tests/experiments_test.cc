#include "pgopt/experiments.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "gtest/gtest.h"
#include "json.hpp"
#include "pgopt/cli.h"
#include "pgopt/config.h"

namespace pgopt {
namespace {

std::string TempDir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("pgopt_test_" + name);
  std::filesystem::remove_all(dir);
  return dir.string();
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig Quick(const std::string& experiment) {
  ExperimentConfig c = DefaultConfig(experiment);
  c.trials = 2;
  c.test_size = 500;
  c.train.epochs = 3;
  c.train.val_size = 40;
  c.n = {40};
  return c;
}

TEST(Regret, HandExample) {
  // f* = -1 picks z = 1, the model predicts +1 and picks z = 0, Y = -1.
  Dataset test{Eigen::MatrixXd::Zero(5, 1), Eigen::MatrixXd::Constant(5, 1, -1.0),
               Eigen::MatrixXd::Constant(5, 1, -1.0)};
  LinearModel model = ZeroModel(1, 1);
  model.b[0] = 1.0;
  EXPECT_DOUBLE_EQ(NormalizedExcessRegret(model, test, Oracle::Binary(1), RegretMode::kTrueMean), 1.0);
  model.b[0] = -3.0;
  EXPECT_DOUBLE_EQ(NormalizedExcessRegret(model, test, Oracle::Binary(1), RegretMode::kTrueMean), 0.0);
}

TEST(Regret, HindsightIsNonnegative) {
  const Dataset test = GenShortestPath(300, AddGaussianNoise{}, 1, 2);
  const Oracle grid = Oracle::GridPath();
  for (uint64_t s = 0; s < 5; ++s) {
    const LinearModel m = GaussianModel(5, 40, s, 0.5);
    EXPECT_GE(NormalizedExcessRegret(m, test, grid, RegretMode::kHindsight), -1e-9);
  }
  // The model that predicts Y exactly is the hindsight policy.
  Dataset echo{test.Y, test.Y, std::nullopt};
  const LinearModel identity{Eigen::MatrixXd::Identity(40, 40), Eigen::VectorXd::Zero(40)};
  EXPECT_NEAR(NormalizedExcessRegret(identity, echo, grid, RegretMode::kHindsight), 0.0, 1e-15);
}

TEST(Regret, TrueMeanModeNeedsMeansAndNonzeroDenominator) {
  Dataset test{Eigen::MatrixXd::Zero(3, 1), Eigen::MatrixXd::Constant(3, 1, 1.0), std::nullopt};
  EXPECT_THROW(RegretEvaluator(test, Oracle::Binary(1), RegretMode::kTrueMean),
               std::invalid_argument);
  // Positive costs: the benchmark picks z = 0 and pays nothing.
  EXPECT_THROW(RegretEvaluator(test, Oracle::Binary(1), RegretMode::kHindsight), std::domain_error);
}

TEST(Summarize, Statistics) {
  const RegretReport r = Summarize("pgb", 100, 0.1, {1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(r.mean, 2.5);
  EXPECT_NEAR(r.stddev, std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_NEAR(r.ci95_half_width, 1.96 * std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
  EXPECT_EQ(Summarize("eto", 1, std::nullopt, {0.3}).ci95_half_width, 0.0);
}

TEST(RunTrial, DeterministicAndOneRowPerMethod) {
  ExperimentConfig c = Quick("simple-misspec");
  const auto a = RunTrial(c, 1);
  const auto b = RunTrial(c, 1);
  ASSERT_EQ(a.size(), c.methods.size());
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].method, b[i].method);
    EXPECT_EQ(a[i].regret, b[i].regret);
    EXPECT_EQ(a[i].chosen_h, b[i].chosen_h);
  }
  c.methods = {"eto"};
  c.n = {40, 80};
  const auto eto = RunTrial(c, 0);
  ASSERT_EQ(eto.size(), 2u);
  EXPECT_EQ(eto[0].n, 40);
  EXPECT_EQ(eto[1].n, 80);
}

TEST(RunTrial, WellSpecifiedNoiselessIsExact) {
  ExperimentConfig c = Quick("simple-misspec");
  c.generator.m = -4.0;
  c.generator.noise_multiplier = 0.0;
  c.methods = {"eto"};
  for (const auto& row : RunTrial(c, 0)) EXPECT_NEAR(row.regret, 0.0, 1e-9);
}

TEST(RunExperiment, ThreadCountDoesNotChangeResults) {
  ExperimentConfig c = Quick("shortest-random");
  c.methods = {"eto", "spo-plus", "pgb"};
  c.trials = 3;
  c.train.h_grid = {0.05};
  const ExperimentResult one = RunExperiment(c, 1);
  const ExperimentResult many = RunExperiment(c, 8);
  EXPECT_EQ(ResultsCsv(one.rows), ResultsCsv(many.rows));
  EXPECT_EQ(SummaryJson(c, one), SummaryJson(c, many));
  EXPECT_EQ(one.rows.size(), 9u);
}

TEST(RunExperiment, CsvRowCountAndSummaryIdentity) {
  ExperimentConfig c = Quick("simple-misspec");
  c.methods = {"eto"};
  c.trials = 1;
  c.n = {100};
  const ExperimentResult r = RunExperiment(c);
  EXPECT_EQ(r.rows.size(), 1u);

  c = Quick("simple-misspec");
  c.trials = 3;
  c.n = {40, 60};
  c.train.h_grid = {0.05, 0.2};
  const ExperimentResult full = RunExperiment(c);
  const auto parsed = ParseResultsCsv(ResultsCsv(full.rows));
  ASSERT_EQ(parsed.size(), full.rows.size());
  std::map<std::pair<std::string, int>, std::vector<double>> groups;
  for (const auto& row : parsed) groups[{row.method, row.n}].push_back(row.regret);
  ASSERT_EQ(full.reports.size(), groups.size());
  for (const auto& rep : full.reports) {
    const auto& values = groups.at({rep.method, rep.n});
    const RegretReport again = Summarize(rep.method, rep.n, rep.h, values);
    EXPECT_NEAR(again.mean, rep.mean, 1e-12);
    EXPECT_NEAR(again.stddev, rep.stddev, 1e-12);
    EXPECT_NEAR(again.ci95_half_width, rep.ci95_half_width, 1e-12);
  }
}

TEST(RunExperiment, HSensitivityEmitsEveryH) {
  ExperimentConfig c = Quick("h-sensitivity");
  c.trials = 1;
  const ExperimentResult r = RunExperiment(c);
  ASSERT_EQ(r.rows.size(), c.h_values.size());
  for (size_t i = 0; i < r.rows.size(); ++i) EXPECT_EQ(*r.rows[i].chosen_h, c.h_values[i]);
  EXPECT_EQ(r.reports.size(), c.h_values.size());
}

TEST(RunExperiment, ZerothCompareRecordsArgmins) {
  ExperimentConfig c = Quick("zeroth-compare");
  c.n = {200};
  const ExperimentResult r = RunExperiment(c);
  EXPECT_EQ(r.zeroth.size(), c.methods.size() * 2);
  for (const auto& z : r.zeroth) {
    EXPECT_GE(z.beta0, -1.0 - 1e-12);
    EXPECT_LE(z.beta0, 1.0 + 1e-12);
  }
}

TEST(Zeroth, BetaGridEndpoints) {
  const auto g = BetaGrid(-1.0, 1.0, 0.01);
  ASSERT_EQ(g.size(), 201u);
  EXPECT_DOUBLE_EQ(g.front(), -1.0);
  EXPECT_NEAR(g.back(), 1.0, 1e-12);
  EXPECT_NEAR(g[100], 0.0, 1e-12);
}

TEST(WriteOutputs, FilesAndByteIdenticalRerun) {
  ExperimentConfig c = Quick("shortest-planted");
  c.methods = {"eto", "pgc"};
  c.train.h_grid = {0.1};
  const std::string dir = TempDir("outputs");
  WriteOutputs(c, RunExperiment(c), dir);
  const std::string first = ReadFile(dir + "/results.csv");
  WriteOutputs(c, RunExperiment(c), dir);
  EXPECT_EQ(ReadFile(dir + "/results.csv"), first);
  const auto summary = nlohmann::json::parse(ReadFile(dir + "/summary.json"));
  EXPECT_EQ(summary["experiment"], "shortest-planted");
  EXPECT_EQ(summary["reports"].size(), 2u);
  std::filesystem::remove_all(dir);
}

TEST(Config, DefaultsAndNames) {
  EXPECT_EQ(ExperimentNames().size(), 6u);
  for (const auto& name : ExperimentNames()) EXPECT_NO_THROW(ValidateConfig(DefaultConfig(name)));
  EXPECT_THROW(DefaultConfig("nope"), ConfigError);
}

TEST(Config, ParsesOverrides) {
  const ExperimentConfig c = ParseConfigToml(R"(
experiment = "shortest-random"
methods = ["eto", "pgf"]
n = [100, 300]
trials = 4
seed = 99
[generator]
noise = "mult-uniform"
bstar_seed = 7
[train]
epochs = 10
h_grid = [0.01, 0.1]
)");
  EXPECT_EQ(c.methods, (std::vector<std::string>{"eto", "pgf"}));
  EXPECT_EQ(c.n, (std::vector<int>{100, 300}));
  EXPECT_EQ(c.trials, 4);
  EXPECT_EQ(c.seed, 99u);
  EXPECT_EQ(c.generator.noise, "mult-uniform");
  EXPECT_EQ(*c.generator.bstar_seed, 7u);
  EXPECT_EQ(c.train.epochs, 10);
  EXPECT_EQ(c.train.h_grid, (std::vector<double>{0.01, 0.1}));
  EXPECT_EQ(c.train.batch, 32);
}

void ExpectConfigErrorNaming(const std::string& toml, const std::string& key) {
  try {
    ValidateConfig(ParseConfigToml(toml));
    FAIL() << "expected a ConfigError for " << key;
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(key), std::string::npos) << e.what();
  }
}

TEST(Config, ErrorsNameTheKey) {
  ExpectConfigErrorNaming("experiment = \"simple-misspec\"\ntrials = \"many\"\n", "trials");
  ExpectConfigErrorNaming("experiment = \"simple-misspec\"\nbogus = 1\n", "bogus");
  ExpectConfigErrorNaming("experiment = \"simple-misspec\"\n[generator]\nnoise = \"add-gaussian\"\n",
                          "noise");
  ExpectConfigErrorNaming("experiment = \"simple-misspec\"\nmethods = [\"dbb\"]\n", "methods");
  ExpectConfigErrorNaming("experiment = \"portfolio\"\nn = [0]\n", "n");
  ExpectConfigErrorNaming("trials = 3\n", "experiment");
  ExpectConfigErrorNaming("experiment = \"simple-misspec\"\n[train]\nh_grid = \"sometimes\"\n",
                          "h_grid");
}

TEST(Config, MalformedTomlIsReported) {
  EXPECT_THROW(ParseConfigToml("experiment = \n"), ConfigError);
}

int Cli(const std::vector<std::string>& args, std::string* out = nullptr, std::string* err = nullptr) {
  std::ostringstream o, e;
  const int code = CliMain(args, o, e);
  if (out) *out = o.str();
  if (err) *err = e.str();
  return code;
}

TEST(Cli, ListExperiments) {
  std::string out;
  EXPECT_EQ(Cli({"list-experiments"}, &out), 0);
  std::istringstream lines(out);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) ++count;
  EXPECT_EQ(count, 6);
  EXPECT_NE(out.find("h-sensitivity"), std::string::npos);
}

TEST(Cli, ValidateConfig) {
  const std::string dir = TempDir("cli_validate");
  std::filesystem::create_directories(dir);
  std::ofstream(dir + "/good.toml") << "experiment = \"portfolio\"\nn = [200]\n";
  std::ofstream(dir + "/bad.toml") << "experiment = \"portfolio\"\n[train]\nepoch = 3\n";
  std::string out, err;
  EXPECT_EQ(Cli({"validate-config", dir + "/good.toml"}, &out), 0);
  EXPECT_NE(Cli({"validate-config", dir + "/bad.toml"}, &out, &err), 0);
  EXPECT_NE(err.find("epoch"), std::string::npos) << err;
  std::filesystem::remove_all(dir);
}

TEST(Cli, UnknownExperimentAndFlag) {
  std::string out, err;
  EXPECT_NE(Cli({"run", "--experiment", "nope"}, &out, &err), 0);
  EXPECT_NE(err.find("Usage"), std::string::npos) << err;
  EXPECT_NE(Cli({"run", "--experiment", "simple-misspec", "--frobnicate"}, &out, &err), 0);
  EXPECT_NE(err.find("Usage"), std::string::npos) << err;
}

TEST(Cli, RunWritesRows) {
  const std::string dir = TempDir("cli_run");
  std::string out, err;
  ASSERT_EQ(Cli({"run", "--experiment", "simple-misspec", "--trials", "2", "--n", "100", "--methods",
                 "eto,pgb", "--out-dir", dir},
                &out, &err),
            0)
      << err;
  const auto rows = ParseResultsCsv(ReadFile(dir + "/results.csv"));
  EXPECT_EQ(rows.size(), 4u);
  EXPECT_TRUE(std::filesystem::exists(dir + "/summary.json"));
  EXPECT_NE(out.find("pgb"), std::string::npos);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace pgopt
