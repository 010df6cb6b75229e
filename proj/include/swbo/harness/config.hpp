// Copyright 2026 The swbo Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

// Experiment configuration files. The format is JSON; every object rejects
// keys it does not know, and errors carry the path of the offending field,
// e.g. `policies[1].p[3]: expected a number in [0, 1]`.

#ifndef SWBO_HARNESS_CONFIG_HPP
#define SWBO_HARNESS_CONFIG_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "swbo/policies.hpp"
#include "swbo/problems.hpp"

namespace swbo::harness {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProblemSpec {
  Function function = Function::kAckley;
  int d = 2;
  int costly_count = 1;

  [[nodiscard]] std::string name() const { return std::string(function_name(function)); }
};

struct OptimizerSpec {
  int raw_samples = 2048;
  int acquisition_restarts = 10;
  int fit_restarts = 8;
};

struct ExperimentConfig {
  std::vector<ProblemSpec> problems;
  std::vector<double> switch_costs;
  std::vector<PolicyConfig> policies;  // grids already expanded
  int runs_per_cell = 20;
  std::uint64_t base_seed = 0;
  int n_multiplier = 10;
  std::string output_dir = "results";
  std::vector<double> allowed_switch_costs = {1, 2, 4, 8, 16, 32};
  OptimizerSpec optimizer;

  [[nodiscard]] RunSettings settings(double c_switch) const {
    RunSettings s;
    s.n_multiplier = n_multiplier;
    s.c_switch = c_switch;
    s.acquisition.raw_samples = optimizer.raw_samples;
    s.acquisition.restarts = optimizer.acquisition_restarts;
    s.fit.restarts = optimizer.fit_restarts;
    return s;
  }
};

/// 0, 0.05, ..., 1.
inline std::vector<double> default_p_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(static_cast<double>(i) / 20.0);
  return grid;
}

inline std::vector<int> default_k_grid() { return {1, 2, 3, 5, 10}; }

namespace config_detail {

using nlohmann::json;

class Reader {
 public:
  [[noreturn]] static void fail(const std::string& path, const std::string& what) {
    throw ConfigError((path.empty() ? std::string("<root>") : path) + ": " + what);
  }

  static void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : obj.items()) {
      const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return key == k; });
      if (!known) fail(join(path, key), "unknown key");
    }
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
  static std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

  static const json& required(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) fail(join(path, key), "missing required field");
    return obj.at(key);
  }

  static double number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "expected a finite number");
    return x;
  }

  static std::int64_t integer(const json& v, const std::string& path, std::int64_t lo, std::int64_t hi) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    const auto x = v.get<std::int64_t>();
    if (x < lo || x > hi) {
      fail(path, "expected an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return x;
  }

  static std::string string(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

  /// A scalar or a nonempty list of scalars.
  template <typename F>
  static auto list_of(const json& v, const std::string& path, F&& item) {
    std::vector<decltype(item(v, path))> out;
    if (v.is_array()) {
      if (v.empty()) fail(path, "expected a nonempty list");
      for (std::size_t i = 0; i < v.size(); ++i) out.push_back(item(v[i], index(path, i)));
    } else {
      out.push_back(item(v, path));
    }
    return out;
  }
};

inline ProblemSpec parse_problem(const json& v, const std::string& path) {
  Reader::only_keys(v, path, {"function", "d", "costly_count"});
  ProblemSpec p;
  const std::string fpath = Reader::join(path, "function");
  try {
    p.function = parse_function(Reader::string(Reader::required(v, path, "function"), fpath));
  } catch (const InvalidArgument& e) {
    Reader::fail(fpath, e.what());
  }
  p.d = static_cast<int>(Reader::integer(Reader::required(v, path, "d"), Reader::join(path, "d"), 2, 4));
  p.costly_count = v.contains("costly_count")
                       ? static_cast<int>(Reader::integer(v.at("costly_count"), Reader::join(path, "costly_count"), 1,
                                                          p.d - 1))
                       : 1;
  return p;
}

inline void parse_policy(const json& v, const std::string& path, std::vector<PolicyConfig>& out) {
  const std::string type = Reader::string(Reader::required(v, path, "type"), Reader::join(path, "type"));
  auto p_item = [](const json& x, const std::string& p) {
    const double value = Reader::number(x, p);
    if (value < 0.0 || value > 1.0) Reader::fail(p, "expected a number in [0, 1]");
    return value;
  };
  auto k_item = [](const json& x, const std::string& p) { return static_cast<int>(Reader::integer(x, p, 1, 1000000)); };

  if (type == "vanilla") {
    Reader::only_keys(v, path, {"type"});
    out.emplace_back(VanillaBO{});
  } else if (type == "eipu") {
    Reader::only_keys(v, path, {"type"});
    out.emplace_back(EipuCool{});
  } else if (type == "preuse") {
    Reader::only_keys(v, path, {"type", "p"});
    const auto grid = v.contains("p") ? Reader::list_of(v.at("p"), Reader::join(path, "p"), p_item) : default_p_grid();
    for (double p : grid) out.emplace_back(PReuse{p});
  } else if (type == "periodic") {
    Reader::only_keys(v, path, {"type", "k"});
    const auto grid = v.contains("k") ? Reader::list_of(v.at("k"), Reader::join(path, "k"), k_item) : default_k_grid();
    for (int k : grid) out.emplace_back(Periodic{k});
  } else if (type == "nested") {
    Reader::only_keys(v, path, {"type", "n", "k"});
    const int n = v.contains("n") ? static_cast<int>(Reader::integer(v.at("n"), Reader::join(path, "n"), 2, 10000)) : 3;
    const auto grid = v.contains("k") ? Reader::list_of(v.at("k"), Reader::join(path, "k"), k_item) : default_k_grid();
    for (int k : grid) {
      if (static_cast<std::size_t>(n) * static_cast<std::size_t>(k) > kMaxNestedDesign) {
        Reader::fail(Reader::join(path, "k"), "n*k exceeds the nested design cap of " + std::to_string(kMaxNestedDesign));
      }
      out.emplace_back(Nested{n, k});
    }
  } else {
    Reader::fail(Reader::join(path, "type"), "unknown policy '" + type + "' (vanilla, preuse, periodic, nested, eipu)");
  }
}

}  // namespace config_detail

inline ExperimentConfig parse_config(const nlohmann::json& root) {
  using config_detail::Reader;
  Reader::only_keys(root, "",
                    {"problems", "switch_costs", "allowed_switch_costs", "policies", "runs_per_cell", "base_seed",
                     "n_multiplier", "output_dir", "optimizer"});
  ExperimentConfig cfg;

  const auto& problems = Reader::required(root, "", "problems");
  if (!problems.is_array() || problems.empty()) Reader::fail("problems", "expected a nonempty list");
  for (std::size_t i = 0; i < problems.size(); ++i) {
    cfg.problems.push_back(config_detail::parse_problem(problems[i], Reader::index("problems", i)));
  }

  if (root.contains("allowed_switch_costs")) {
    cfg.allowed_switch_costs = Reader::list_of(root.at("allowed_switch_costs"), "allowed_switch_costs", Reader::number);
  }
  cfg.switch_costs = Reader::list_of(Reader::required(root, "", "switch_costs"), "switch_costs", Reader::number);
  for (std::size_t i = 0; i < cfg.switch_costs.size(); ++i) {
    const double c = cfg.switch_costs[i];
    const std::string path = Reader::index("switch_costs", i);
    if (c < 1.0) Reader::fail(path, "switch cost must be >= 1");
    if (std::find(cfg.allowed_switch_costs.begin(), cfg.allowed_switch_costs.end(), c) == cfg.allowed_switch_costs.end()) {
      Reader::fail(path, "switch cost not in allowed_switch_costs");
    }
  }

  const auto& policies = Reader::required(root, "", "policies");
  if (!policies.is_array() || policies.empty()) Reader::fail("policies", "expected a nonempty list");
  for (std::size_t i = 0; i < policies.size(); ++i) {
    config_detail::parse_policy(policies[i], Reader::index("policies", i), cfg.policies);
  }

  if (root.contains("runs_per_cell")) {
    cfg.runs_per_cell = static_cast<int>(Reader::integer(root.at("runs_per_cell"), "runs_per_cell", 1, 1000000));
  }
  if (root.contains("base_seed")) {
    const auto& s = root.at("base_seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      Reader::fail("base_seed", "expected a nonnegative integer");
    }
    cfg.base_seed = s.get<std::uint64_t>();
  }
  if (root.contains("n_multiplier")) {
    cfg.n_multiplier = static_cast<int>(Reader::integer(root.at("n_multiplier"), "n_multiplier", 1, 10000));
  }
  if (root.contains("output_dir")) cfg.output_dir = Reader::string(root.at("output_dir"), "output_dir");
  if (root.contains("optimizer")) {
    const auto& o = root.at("optimizer");
    Reader::only_keys(o, "optimizer", {"raw_samples", "acquisition_restarts", "fit_restarts"});
    if (o.contains("raw_samples")) {
      cfg.optimizer.raw_samples = static_cast<int>(Reader::integer(o.at("raw_samples"), "optimizer.raw_samples", 1, 1 << 24));
    }
    if (o.contains("acquisition_restarts")) {
      cfg.optimizer.acquisition_restarts = static_cast<int>(
          Reader::integer(o.at("acquisition_restarts"), "optimizer.acquisition_restarts", 1, 100000));
    }
    if (o.contains("fit_restarts")) {
      cfg.optimizer.fit_restarts = static_cast<int>(Reader::integer(o.at("fit_restarts"), "optimizer.fit_restarts", 0, 100000));
    }
  }
  return cfg;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(root);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace swbo::harness

#endif  // SWBO_HARNESS_CONFIG_HPP
