#include "pgopt/config.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#define TOML_EXCEPTIONS 1
#include "toml.hpp"

namespace pgopt {
namespace {

bool Contains(const std::vector<std::string>& list, const std::string& item) {
  return std::find(list.begin(), list.end(), item) != list.end();
}

[[noreturn]] void BadKey(const std::string& key, const std::string& what) {
  throw ConfigError("config key '" + key + "': " + what);
}

double AsDouble(const toml::node& node, const std::string& key) {
  if (auto v = node.value<double>()) return *v;
  BadKey(key, "expected a number");
}

int64_t AsInt(const toml::node& node, const std::string& key) {
  if (!node.is_integer()) BadKey(key, "expected an integer");
  return *node.value<int64_t>();
}

bool AsBool(const toml::node& node, const std::string& key) {
  if (!node.is_boolean()) BadKey(key, "expected true or false");
  return *node.value<bool>();
}

std::string AsString(const toml::node& node, const std::string& key) {
  if (!node.is_string()) BadKey(key, "expected a string");
  return *node.value<std::string>();
}

const toml::array& AsArray(const toml::node& node, const std::string& key) {
  const auto* arr = node.as_array();
  if (arr == nullptr) BadKey(key, "expected an array");
  return *arr;
}

std::vector<std::string> AsStringList(const toml::node& node, const std::string& key) {
  std::vector<std::string> out;
  for (const auto& item : AsArray(node, key)) out.push_back(AsString(item, key));
  return out;
}

std::vector<double> AsDoubleList(const toml::node& node, const std::string& key) {
  std::vector<double> out;
  for (const auto& item : AsArray(node, key)) out.push_back(AsDouble(item, key));
  return out;
}

int AsIntChecked(const toml::node& node, const std::string& key, int64_t lo) {
  const int64_t v = AsInt(node, key);
  if (v < lo || v > (int64_t{1} << 31) - 1) BadKey(key, "out of range");
  return static_cast<int>(v);
}

uint64_t AsSeed(const toml::node& node, const std::string& key) {
  const int64_t v = AsInt(node, key);
  if (v < 0) BadKey(key, "seeds must be non-negative");
  return static_cast<uint64_t>(v);
}

const toml::table& AsTable(const toml::node& node, const std::string& key) {
  const auto* tbl = node.as_table();
  if (tbl == nullptr) BadKey(key, "expected a table");
  return *tbl;
}

bool UsesSimpleGenerator(const std::string& e) {
  return e == "simple-misspec" || e == "zeroth-compare";
}
bool UsesGridGenerator(const std::string& e) {
  return e == "shortest-random" || e == "shortest-planted" || e == "h-sensitivity";
}

void ParseGenerator(const toml::table& tbl, ExperimentConfig& config) {
  const std::string& e = config.experiment;
  GeneratorParams& g = config.generator;
  for (const auto& [k, node] : tbl) {
    const std::string key = "generator." + std::string(k.str());
    const std::string name(k.str());
    auto require = [&](bool ok) {
      if (!ok) BadKey(key, "does not apply to experiment '" + e + "'");
    };
    if (name == "m") {
      require(UsesSimpleGenerator(e));
      g.m = AsDouble(node, key);
    } else if (name == "alpha") {
      require(UsesSimpleGenerator(e));
      g.alpha = AsDouble(node, key);
    } else if (name == "noise_multiplier") {
      require(UsesSimpleGenerator(e));
      g.noise_multiplier = AsDouble(node, key);
    } else if (name == "noise") {
      require(UsesGridGenerator(e));
      g.noise = AsString(node, key);
    } else if (name == "bstar_seed") {
      require(UsesGridGenerator(e));
      g.bstar_seed = AsSeed(node, key);
    } else if (name == "returns_path") {
      require(e == "portfolio");
      g.returns_path = AsString(node, key);
    } else if (name == "returns_in_percent") {
      require(e == "portfolio");
      g.returns_in_percent = AsBool(node, key);
    } else if (name == "noise_scale") {
      require(e == "portfolio");
      g.noise_scale = AsDouble(node, key);
    } else {
      BadKey(key, "unknown key");
    }
  }
}

void ParseTrain(const toml::table& tbl, TrainConfig& train) {
  for (const auto& [k, node] : tbl) {
    const std::string name(k.str());
    const std::string key = "train." + name;
    if (name == "epochs") {
      train.epochs = AsIntChecked(node, key, 1);
    } else if (name == "batch") {
      train.batch = AsIntChecked(node, key, 1);
    } else if (name == "lr") {
      train.lr = AsDouble(node, key);
    } else if (name == "val_size") {
      train.val_size = AsIntChecked(node, key, 0);
    } else if (name == "h_grid") {
      if (node.is_string()) {
        if (AsString(node, key) != "auto") BadKey(key, "expected \"auto\" or a list of h values");
        train.h_grid.clear();
      } else {
        train.h_grid = AsDoubleList(node, key);
        if (train.h_grid.empty()) BadKey(key, "empty h grid");
      }
    } else if (name == "warm_start") {
      train.warm_start = AsBool(node, key);
    } else if (name == "seed") {
      BadKey(key, "training seeds are derived from the top-level seed");
    } else {
      BadKey(key, "unknown key");
    }
  }
}

void ParseZeroth(const toml::table& tbl, ZerothParams& z) {
  for (const auto& [k, node] : tbl) {
    const std::string name(k.str());
    const std::string key = "zeroth." + name;
    if (name == "slope") {
      z.slope = AsDouble(node, key);
    } else if (name == "beta_min") {
      z.beta_min = AsDouble(node, key);
    } else if (name == "beta_max") {
      z.beta_max = AsDouble(node, key);
    } else if (name == "beta_step") {
      z.beta_step = AsDouble(node, key);
    } else if (name == "h") {
      z.h = AsDouble(node, key);
    } else {
      BadKey(key, "unknown key");
    }
  }
}

}  // namespace

const std::vector<std::string>& ExperimentNames() {
  static const std::vector<std::string> names = {"simple-misspec", "shortest-random",
                                                 "shortest-planted", "portfolio",
                                                 "zeroth-compare", "h-sensitivity"};
  return names;
}

ExperimentConfig DefaultConfig(const std::string& experiment) {
  if (!Contains(ExperimentNames(), experiment)) {
    throw ConfigError("config key 'experiment': unknown experiment '" + experiment + "'");
  }
  ExperimentConfig c;
  c.experiment = experiment;
  if (experiment == "simple-misspec") {
    c.methods = {"eto", "spo-plus", "pgb", "pgc"};
    c.n = {100, 500, 2000};
  } else if (experiment == "shortest-random") {
    c.methods = {"eto", "spo-plus", "pgb", "pgc", "pgf"};
    c.n = {200, 800};
  } else if (experiment == "shortest-planted") {
    c.methods = {"eto", "spo-plus", "pgb", "pgc"};
    c.n = {200, 800};
  } else if (experiment == "portfolio") {
    c.methods = {"eto", "spo-plus", "pgb", "pgc"};
    c.n = {200, 800};
  } else if (experiment == "zeroth-compare") {
    c.methods = {"decision", "pgb", "pgc", "pgf"};
    c.n = {200};
  } else if (experiment == "h-sensitivity") {
    c.methods = {"pgb"};
    c.n = {800};
    c.h_values = {0.001, 0.035, 0.188, 0.434};
  }
  return c;
}

ExperimentConfig ParseConfigToml(const std::string& text) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& err) {
    std::ostringstream msg;
    msg << "config: TOML syntax error at line " << err.source().begin.line << ": "
        << err.description();
    throw ConfigError(msg.str());
  }
  const toml::node* name_node = root.get("experiment");
  if (name_node == nullptr) throw ConfigError("config key 'experiment': missing");
  ExperimentConfig config = DefaultConfig(AsString(*name_node, "experiment"));

  for (const auto& [k, node] : root) {
    const std::string key(k.str());
    if (key == "experiment") {
      continue;
    } else if (key == "methods") {
      config.methods = AsStringList(node, key);
    } else if (key == "n") {
      config.n.clear();
      for (const auto& item : AsArray(node, key)) config.n.push_back(AsIntChecked(item, key, 1));
    } else if (key == "trials") {
      config.trials = AsIntChecked(node, key, 1);
    } else if (key == "seed") {
      config.seed = AsSeed(node, key);
    } else if (key == "test_size") {
      config.test_size = AsIntChecked(node, key, 1);
    } else if (key == "record_timing") {
      config.record_timing = AsBool(node, key);
    } else if (key == "generator") {
      ParseGenerator(AsTable(node, key), config);
    } else if (key == "train") {
      ParseTrain(AsTable(node, key), config.train);
    } else if (key == "h_values") {
      if (config.experiment != "h-sensitivity") {
        BadKey(key, "does not apply to experiment '" + config.experiment + "'");
      }
      config.h_values = AsDoubleList(node, key);
    } else if (key == "zeroth") {
      if (config.experiment != "zeroth-compare") {
        BadKey(key, "does not apply to experiment '" + config.experiment + "'");
      }
      ParseZeroth(AsTable(node, key), config.zeroth);
    } else {
      BadKey(key, "unknown key");
    }
  }
  ValidateConfig(config);
  return config;
}

ExperimentConfig LoadConfigFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseConfigToml(buffer.str());
}

void ValidateConfig(const ExperimentConfig& c) {
  if (!Contains(ExperimentNames(), c.experiment)) {
    throw ConfigError("config key 'experiment': unknown experiment '" + c.experiment + "'");
  }
  if (c.methods.empty()) BadKey("methods", "at least one method is required");
  for (const auto& m : c.methods) {
    if (c.experiment == "zeroth-compare") {
      if (m != "decision" && m != "pgb" && m != "pgc" && m != "pgf") {
        BadKey("methods", "zeroth-compare takes decision, pgb, pgc or pgf, got '" + m + "'");
      }
    } else if (c.experiment == "h-sensitivity") {
      if (m != "pgb" && m != "pgc" && m != "pgf") {
        BadKey("methods", "h-sensitivity takes PG methods only, got '" + m + "'");
      }
    } else {
      try {
        ParseMethod(m);
      } catch (const std::invalid_argument& err) {
        BadKey("methods", err.what());
      }
    }
  }
  if (c.n.empty()) BadKey("n", "at least one sample size is required");
  for (int n : c.n) {
    if (n < 1) BadKey("n", "sample sizes must be >= 1");
  }
  if (c.trials < 1) BadKey("trials", "must be >= 1");
  if (c.test_size < 1) BadKey("test_size", "must be >= 1");
  if (c.train.epochs < 1) BadKey("train.epochs", "must be >= 1");
  if (c.train.batch < 1) BadKey("train.batch", "must be >= 1");
  if (!(c.train.lr > 0.0)) BadKey("train.lr", "must be positive");
  if (c.train.val_size < 0) BadKey("train.val_size", "must be >= 0");
  for (double h : c.train.h_grid) {
    if (!(h > 0.0) || !std::isfinite(h)) BadKey("train.h_grid", "h values must be positive");
  }
  const auto& g = c.generator;
  if (UsesSimpleGenerator(c.experiment)) {
    if (!(g.m >= -4.0 && g.m <= 0.0)) BadKey("generator.m", "must lie in [-4, 0]");
    if (!(g.alpha >= 0.0 && g.alpha <= 1.0)) BadKey("generator.alpha", "must lie in [0, 1]");
    if (!(g.noise_multiplier >= 0.0)) BadKey("generator.noise_multiplier", "must be >= 0");
  }
  if (UsesGridGenerator(c.experiment) && g.noise != "mult-uniform" && g.noise != "add-gaussian") {
    BadKey("generator.noise", "expected mult-uniform or add-gaussian, got '" + g.noise + "'");
  }
  if (c.experiment == "portfolio" && !(g.noise_scale >= 0.0)) {
    BadKey("generator.noise_scale", "must be >= 0");
  }
  if (c.experiment == "h-sensitivity") {
    if (c.h_values.empty()) BadKey("h_values", "at least one h is required");
    for (double h : c.h_values) {
      if (!(h > 0.0) || !std::isfinite(h)) BadKey("h_values", "h values must be positive");
    }
  }
  if (c.experiment == "zeroth-compare") {
    const auto& z = c.zeroth;
    if (!(z.beta_step > 0.0)) BadKey("zeroth.beta_step", "must be positive");
    if (!(z.beta_max >= z.beta_min)) BadKey("zeroth.beta_max", "must be >= beta_min");
    if (z.h && !(*z.h > 0.0)) BadKey("zeroth.h", "must be positive");
  }
}

}  // namespace pgopt
