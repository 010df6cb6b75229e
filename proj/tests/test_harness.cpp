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

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "swbo/harness/config.hpp"
#include "swbo/harness/experiment.hpp"
#include "swbo/harness/summarize.hpp"

namespace swbo::harness {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("swbo_test_harness_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

// A small grid that runs in about a second.
const char* kSmallConfig = R"({
  "problems": [{"function": "levy", "d": 2, "costly_count": 1}],
  "switch_costs": [2],
  "policies": [{"type": "vanilla"}, {"type": "preuse", "p": 0.5}],
  "runs_per_cell": 3,
  "base_seed": 7,
  "n_multiplier": 2,
  "optimizer": {"raw_samples": 128, "acquisition_restarts": 2, "fit_restarts": 1}
})";

TEST(Config, ParsesAndExpandsGrids) {
  const ExperimentConfig cfg = parse_config_text(R"({
    "problems": [{"function": "ackley", "d": 3, "costly_count": 2}],
    "switch_costs": [2, 16],
    "policies": [{"type": "preuse"}, {"type": "periodic"}, {"type": "nested", "k": [2, 4]}, {"type": "eipu"}],
    "runs_per_cell": 4, "base_seed": 9
  })");
  ASSERT_EQ(cfg.problems.size(), 1u);
  EXPECT_EQ(cfg.problems[0].function, Function::kAckley);
  EXPECT_EQ(cfg.problems[0].costly_count, 2);
  EXPECT_EQ(cfg.policies.size(), 21u + 5u + 2u + 1u);
  EXPECT_EQ(cfg.policies[0].label(), "preuse(p=0)");
  EXPECT_EQ(cfg.policies[1].label(), "preuse(p=0.05)");
  EXPECT_EQ(cfg.policies[20].label(), "preuse(p=1)");
  EXPECT_EQ(cfg.policies[25].label(), "periodic(k=10)");
  EXPECT_EQ(cfg.policies[27].label(), "nested(n=3;k=4)");
  EXPECT_EQ(cfg.n_multiplier, 10);
  EXPECT_EQ(cfg.base_seed, 9u);
}

TEST(Config, ErrorsNameTheField) {
  EXPECT_EQ(error_of(R"({"problems": [{"function": "ackley", "d": 2}], "switch_costs": [2],
                          "policies": [{"type": "vanilla"}], "runz": 3})"),
            "runz: unknown key");
  EXPECT_EQ(error_of(R"({"problems": [{"function": "ackley", "d": 2, "costly": 1}], "switch_costs": [2],
                          "policies": [{"type": "vanilla"}]})"),
            "problems[0].costly: unknown key");
  EXPECT_EQ(error_of(R"({"problems": [{"function": "ackley", "d": 2}], "switch_costs": [2],
                          "policies": [{"type": "vanilla"}, {"type": "preuse", "p": [0.1, 1.5]}]})"),
            "policies[1].p[1]: expected a number in [0, 1]");
  EXPECT_EQ(error_of(R"({"problems": [{"function": "sphere", "d": 2}], "switch_costs": [2],
                          "policies": [{"type": "vanilla"}]})"),
            "problems[0].function: unknown test function 'sphere'");
  EXPECT_EQ(error_of(R"({"problems": [{"function": "ackley", "d": 2, "costly_count": 2}], "switch_costs": [2],
                          "policies": [{"type": "vanilla"}]})"),
            "problems[0].costly_count: expected an integer in [1, 1]");
  EXPECT_EQ(error_of(R"({"problems": [{"function": "ackley", "d": 2}], "switch_costs": [3],
                          "policies": [{"type": "vanilla"}]})"),
            "switch_costs[0]: switch cost not in allowed_switch_costs");
  EXPECT_EQ(error_of(R"({"problems": [{"function": "ackley", "d": 2}], "switch_costs": [3],
                          "allowed_switch_costs": [3], "policies": [{"type": "vanilla"}]})"),
            "");
  EXPECT_EQ(error_of(R"({"problems": [{"function": "ackley", "d": 2}], "switch_costs": [2],
                          "policies": [{"type": "vanilla", "p": 1}]})"),
            "policies[0].p: unknown key");
  EXPECT_EQ(error_of(R"({"switch_costs": [2], "policies": [{"type": "vanilla"}]})"), "problems: missing required field");
  EXPECT_EQ(error_of(R"({"problems": [{"function": "ackley", "d": 2}], "switch_costs": [2],
                          "policies": [{"type": "random"}]})"),
            "policies[0].type: unknown policy 'random' (vanilla, preuse, periodic, nested, eipu)");
  EXPECT_NE(error_of("{not json"), "");
}

TEST(DryRun, PaperPSweepHas14700Cells) {
  const ExperimentConfig cfg = load_config(std::string(SWBO_CONFIG_DIR) + "/psweep.json");
  const DryRunReport r = dry_run(cfg);
  EXPECT_EQ(r.cells, 14700u);
  EXPECT_EQ(r.problems, 7u);
  EXPECT_EQ(r.policies, 21u);
  EXPECT_EQ(r.switch_costs, 5u);
  EXPECT_EQ(r.runs, 20);
  for (const auto& p : cfg.problems) {
    EXPECT_EQ(p.d, 4);
    EXPECT_EQ(p.costly_count, 1);
  }
}

TEST(DryRun, ShippedConfigsParse) {
  for (const char* name : {"psweep.json", "table2.json", "desk.json", "desk_psweep.json", "desk_nested.json"}) {
    EXPECT_NO_THROW(load_config(std::string(SWBO_CONFIG_DIR) + "/" + name)) << name;
  }
}

TEST(Seeds, SharedAcrossPoliciesAndCosts) {
  const Cell a{0, 1, 0, 0, 3}, b{99, 1, 2, 4, 3}, other_run{5, 1, 0, 0, 4};
  EXPECT_EQ(seeds_for(5, a).assignment, seeds_for(5, b).assignment);
  EXPECT_EQ(seeds_for(5, a).design, seeds_for(5, b).design);
  EXPECT_NE(seeds_for(5, a).policy, seeds_for(5, b).policy);
  EXPECT_NE(seeds_for(5, a).design, seeds_for(5, other_run).design);
  EXPECT_NE(seeds_for(5, a).design, seeds_for(6, a).design);
}

TEST(Seeds, AllPolicySeedsDistinct) {
  const ExperimentConfig cfg = parse_config_text(R"({
    "problems": [{"function": "ackley", "d": 2}, {"function": "levy", "d": 3}],
    "switch_costs": [1, 2, 4], "policies": [{"type": "preuse"}], "runs_per_cell": 20})");
  std::set<std::uint64_t> seen;
  for (const auto& cell : enumerate_cells(cfg)) seen.insert(seeds_for(cfg.base_seed, cell).policy);
  EXPECT_EQ(seen.size(), enumerate_cells(cfg).size());
}

TEST(Run, SummaryRowCountAndSchema) {
  const ExperimentConfig cfg = parse_config_text(kSmallConfig);
  const fs::path dir = scratch("schema");
  run_experiment(cfg, YStarTable::builtin(), {.jobs = 1, .out_dir = dir});

  const CsvTable summary = CsvTable::load(dir / "summary.csv");
  EXPECT_EQ(summary.rows().size(), 6u);
  EXPECT_EQ(summary.header(), std::vector<std::string>(std::begin(kSummaryColumns), std::end(kSummaryColumns)));
  const CsvTable trace = CsvTable::load(dir / "trace.csv");
  EXPECT_EQ(trace.header(), std::vector<std::string>(std::begin(kTraceColumns), std::end(kTraceColumns)));
  EXPECT_EQ(slurp(dir / "gap_vs_cost.csv").substr(0, 22), "policy,cost,mean_gap\n" + std::string("p"));
  for (const auto& entry : fs::directory_iterator(dir)) EXPECT_NE(entry.path().extension(), ".tmp");

  // summary rows agree with the trace they came from
  const std::size_t run_col = trace.column("run_id"), cum_col = trace.column("cum_cost");
  std::map<std::string, std::string> last_cost;
  for (const auto& row : trace.rows()) last_cost[row[run_col]] = row[cum_col];
  for (const auto& row : summary.rows()) EXPECT_EQ(last_cost.at(row[0]), row[summary.column("final_cost")]);

  const auto meta = nlohmann::json::parse(slurp(dir / "metadata.json"));
  EXPECT_EQ(meta["cells"], 6);
  EXPECT_EQ(meta["config"]["base_seed"], 7);
}

TEST(Run, ByteIdenticalSerialRepeatAndParallel) {
  const ExperimentConfig cfg = parse_config_text(kSmallConfig);
  const fs::path a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
  run_experiment(cfg, YStarTable::builtin(), {.jobs = 1, .out_dir = a});
  run_experiment(cfg, YStarTable::builtin(), {.jobs = 1, .out_dir = b});
  run_experiment(cfg, YStarTable::builtin(), {.jobs = 4, .out_dir = c});
  for (const char* f : {"trace.csv", "summary.csv", "gap_vs_cost.csv", "metadata.json"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(c / f)) << f;
  }
}

TEST(Run, NestedMetadataAndPerCostCurves) {
  ExperimentConfig cfg = parse_config_text(kSmallConfig);
  cfg.policies = {Nested{3, 2}};
  cfg.switch_costs = {1, 2};
  cfg.runs_per_cell = 1;
  const fs::path dir = scratch("nested");
  run_experiment(cfg, YStarTable::builtin(), {.jobs = 2, .out_dir = dir});
  EXPECT_TRUE(fs::exists(dir / "gap_vs_cost_c1.csv"));
  EXPECT_TRUE(fs::exists(dir / "gap_vs_cost_c2.csv"));
  const auto meta = nlohmann::json::parse(slurp(dir / "metadata.json"));
  ASSERT_EQ(meta["nested_design_y0"].size(), 2u);
  EXPECT_TRUE(meta["nested_design_y0"][0].contains("shared_design_y0"));
}

std::vector<SummaryRecord> records(std::initializer_list<std::tuple<std::string, std::string, double>> rows,
                                   double cost = 16.0, const std::string& problem = "ackley") {
  std::vector<SummaryRecord> out;
  int id = 0;
  for (const auto& [label, params, gap] : rows) {
    SummaryRecord r;
    r.run_id = std::to_string(id++);
    r.policy = label;
    r.problem = problem;
    r.d = 2;
    r.switch_cost = cost;
    r.policy_params = params;
    r.gap = gap;
    out.push_back(r);
  }
  return out;
}

TEST(Table2, MarksBestAndSecond) {
  const auto rows = table2(records({{"vanilla", "none", 0.8}, {"eipu", "none", 0.9}, {"periodic(k=2)", "k=2", 0.7}}));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].policy, "eipu");
  EXPECT_EQ(rows[0].mark, Mark::kBest);
  EXPECT_EQ(rows[1].policy, "vanilla");
  EXPECT_EQ(rows[1].mark, Mark::kSecond);
  EXPECT_EQ(rows[2].mark, Mark::kNone);
}

TEST(Table2, TiesAreAllBestOrderedByName) {
  const auto rows = table2(records({{"vanilla", "none", 0.9}, {"eipu", "none", 0.9}, {"periodic(k=2)", "k=2", 0.5}}));
  EXPECT_EQ(rows[0].policy, "eipu");
  EXPECT_EQ(rows[1].policy, "vanilla");
  EXPECT_EQ(rows[0].mark, Mark::kBest);
  EXPECT_EQ(rows[1].mark, Mark::kBest);
  EXPECT_EQ(rows[2].mark, Mark::kSecond);
}

TEST(Table2, BestConfigurationPerFamily) {
  const auto rows = table2(records({{"periodic(k=2)", "k=2", 0.4},
                                    {"periodic(k=2)", "k=2", 0.6},
                                    {"periodic(k=5)", "k=5", 0.7},
                                    {"periodic(k=5)", "k=5", 0.7}}));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].policy_params, "k=5");
  EXPECT_DOUBLE_EQ(rows[0].mean_gap, 0.7);
  EXPECT_EQ(rows[0].runs, 2u);
}

TEST(Psweep, GapEqualToPPicksOne) {
  std::vector<SummaryRecord> all;
  for (double cost : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    for (const auto& problem : {"ackley", "levy"}) {
      for (int i = 0; i <= 20; ++i) {
        const double p = i / 20.0;
        char params[32];
        std::snprintf(params, sizeof(params), "p=%g", p);
        auto r = records({{std::string("preuse(") + params + ")", params, p}}, cost, problem);
        all.insert(all.end(), r.begin(), r.end());
      }
    }
  }
  const PsweepResult res = psweep(all);
  ASSERT_EQ(res.best_p.size(), 5u);
  for (const auto& b : res.best_p) EXPECT_EQ(b.median_best_p, 1.0);
  EXPECT_EQ(res.curve.size(), 5u * 21u);
  for (const auto& c : res.curve) EXPECT_DOUBLE_EQ(c.mean_gap, c.p);
}

TEST(Summarize, MissingColumnIsNamed) {
  std::stringstream csv("run_id,policy,problem,d,switch_cost,gap\n0,vanilla,ackley,2,2,0.5\n");
  const CsvTable t = CsvTable::parse(csv, "summary.csv");
  try {
    read_summary(t);
    FAIL() << "expected a schema error";
  } catch (const SchemaError& e) {
    EXPECT_STREQ(e.what(), "summary.csv: missing column 'policy_params'");
  }
}

}  // namespace
}  // namespace swbo::harness
