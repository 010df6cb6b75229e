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

// swbo: run switching-cost Bayesian optimization sweeps and summarize them.
//
//   swbo run configs/desk.json --jobs 4 --out results/desk
//   swbo dry-run configs/psweep.json
//   swbo summarize results/desk --mode table2
//   swbo oracle --out data/y_star.txt

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "swbo/harness/config.hpp"
#include "swbo/harness/experiment.hpp"
#include "swbo/harness/summarize.hpp"
#include "swbo/problems.hpp"

namespace fs = std::filesystem;
using namespace swbo;
using namespace swbo::harness;

namespace {

struct Common {
  std::optional<std::uint64_t> seed;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  std::string out;
  std::string y_star = SWBO_DEFAULT_Y_STAR;
};

ExperimentConfig load_with_overrides(const std::string& path, const Common& common) {
  ExperimentConfig cfg = load_config(path);
  if (common.seed) cfg.base_seed = *common.seed;
  if (!common.out.empty()) cfg.output_dir = common.out;
  return cfg;
}

int cmd_run(const std::string& config_path, const Common& common, bool quiet) {
  const ExperimentConfig cfg = load_with_overrides(config_path, common);
  const YStarTable table = YStarTable::load(common.y_star);
  RunOptions opts;
  opts.jobs = common.jobs;
  opts.out_dir = cfg.output_dir;
  if (!quiet) {
    opts.progress = [](const CellResult& r, std::size_t done, std::size_t total) {
      std::fprintf(stderr, "[%zu/%zu] %s %s d=%d c=%g run %d gap=%.4f\n", done, total, r.problem_name.c_str(),
                   r.policy_label.c_str(), r.d, r.switch_cost, r.cell.run, r.summary.gap);
    };
  }
  const RunReport report = run_experiment(cfg, table, opts);
  std::printf("%zu runs written to %s\n", report.cells, cfg.output_dir.c_str());
  for (const auto& f : report.files) std::printf("  %s\n", f.string().c_str());
  return 0;
}

int cmd_dry_run(const std::string& config_path, const Common& common) {
  const ExperimentConfig cfg = load_with_overrides(config_path, common);
  const DryRunReport r = dry_run(cfg);
  std::printf("problems      %zu\n", r.problems);
  for (const auto& p : cfg.problems) std::printf("  %s d=%d costly=%d\n", p.name().c_str(), p.d, p.costly_count);
  std::printf("switch costs  %zu:", r.switch_costs);
  for (double c : cfg.switch_costs) std::printf(" %g", c);
  std::printf("\npolicies      %zu\n", r.policies);
  for (const auto& label : r.policy_labels) std::printf("  %s\n", label.c_str());
  std::printf("runs per cell %d\nbase seed     %llu\noutput dir    %s\ncells         %zu\n", r.runs,
              static_cast<unsigned long long>(cfg.base_seed), cfg.output_dir.c_str(), r.cells);
  return 0;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  body(out);
  std::printf("  %s\n", path.string().c_str());
}

int cmd_summarize(const std::string& dir, const std::string& mode, const Common& common) {
  const auto records = load_summary(dir);
  const fs::path out_dir = common.out.empty() ? fs::path(dir) : fs::path(common.out);
  fs::create_directories(out_dir);
  if (mode == "table2") {
    const auto rows = table2(records);
    std::printf("%-6s %-12s %-2s %-9s %-10s %-9s %s\n", "cost", "problem", "d", "policy", "params", "mean_gap", "mark");
    for (const auto& r : rows) {
      std::printf("%-6g %-12s %-2d %-9s %-10s %-9.4f %s\n", r.switch_cost, r.problem.c_str(), r.d, r.policy.c_str(),
                  r.policy_params.c_str(), r.mean_gap, mark_name(r.mark));
    }
    write_file(out_dir / "table2.csv", [&](std::ostream& o) { write_table2(o, rows); });
  } else {
    const auto res = psweep(records);
    std::printf("%-6s %-6s %-9s %s\n", "cost", "p", "mean_gap", "ci95");
    for (const auto& c : res.curve) std::printf("%-6g %-6g %-9.4f %.4f\n", c.switch_cost, c.p, c.mean_gap, c.ci_halfwidth);
    std::printf("\n%-6s %s\n", "cost", "median best p");
    for (const auto& b : res.best_p) std::printf("%-6g %g\n", b.switch_cost, b.median_best_p);
    write_file(out_dir / "psweep_curve.csv", [&](std::ostream& o) { write_psweep_curve(o, res); });
    write_file(out_dir / "psweep_best_p.csv", [&](std::ostream& o) { write_best_p(o, res); });
  }
  return 0;
}

int cmd_oracle(const Common& common, std::size_t grid) {
  YStarTable table;
  std::vector<std::pair<Function, int>> keys;
  for (auto f : kAllFunctions) {
    for (int d = 2; d <= 4; ++d) keys.emplace_back(f, d);
  }
  std::vector<double> values(keys.size());
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < std::max(1u, common.jobs); ++j) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < keys.size();) {
          values[i] = oracle_y_star(keys[i].first, keys[i].second, grid);
        }
      });
    }
  }
  for (std::size_t i = 0; i < keys.size(); ++i) {
    table.set(keys[i].first, keys[i].second, values[i]);
    std::fprintf(stderr, "%s,%d = %.17g\n", std::string(function_name(keys[i].first)).c_str(), keys[i].second, values[i]);
  }
  if (common.out.empty()) {
    table.write(std::cout);
  } else {
    write_file(common.out, [&](std::ostream& o) { table.write(o); });
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Switching-cost Bayesian optimization experiments"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub, bool with_seed) {
    if (with_seed) sub->add_option("--seed", common.seed, "override the config's base_seed");
    sub->add_option("--jobs", common.jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", common.out, "output directory (or file for oracle)");
  };

  std::string config_path;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "execute every cell of a config");
  run->add_option("config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--y-star", common.y_star, "y_star constants file")->check(CLI::ExistingFile);
  run->add_flag("--quiet", quiet, "no per-run progress");
  add_common(run, true);

  auto* dry = app.add_subcommand("dry-run", "parse a config and count its cells");
  dry->add_option("config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  add_common(dry, true);

  std::string dir, mode;
  auto* summarize = app.add_subcommand("summarize", "tables from a results directory");
  summarize->add_option("dir", dir, "results directory holding summary.csv")->required()->check(CLI::ExistingDirectory);
  summarize->add_option("--mode", mode, "table2 or psweep")->required()->check(CLI::IsMember({"table2", "psweep"}));
  add_common(summarize, false);

  std::size_t grid = 1000000;
  auto* oracle = app.add_subcommand("oracle", "recompute the y_star constants by dense grid search");
  oracle->add_option("--grid", grid, "grid points per (function, d)");
  add_common(oracle, false);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(config_path, common, quiet);
    if (*dry) return cmd_dry_run(config_path, common);
    if (*summarize) return cmd_summarize(dir, mode, common);
    if (*oracle) return cmd_oracle(common, grid);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "swbo: %s\n", e.what());
    return 1;
  }
  return 0;
}
