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

// Sweep execution: cell enumeration, seed composition, the worker pool and
// the result files.
//
// Seeds. With mix(w...) = fold of h <- splitmix64(h ^ w) starting from
// h = 0x73776230, every run draws from
//   assignment = base ^ mix(1, problem, r)          costly dimensions
//   design     = base ^ mix(2, problem, r)          initialization
//   policy     = base ^ mix(3, problem, cost, policy, r)
// so the costly assignment and the initial design of run r are shared by
// every policy and switch cost, and nothing depends on execution order.

#ifndef SWBO_HARNESS_EXPERIMENT_HPP
#define SWBO_HARNESS_EXPERIMENT_HPP

#include <atomic>
#include <condition_variable>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "swbo/harness/config.hpp"
#include "swbo/metrics.hpp"
#include "swbo/policies.hpp"

namespace swbo::harness {

inline constexpr const char* kTraceColumns[] = {"run_id", "policy",  "problem",   "d",         "costly_indices",
                                                "switch_cost", "t",   "phase",     "is_switch", "degraded",
                                                "step_cost",   "cum_cost", "y",   "best_y"};
inline constexpr const char* kSummaryColumns[] = {"run_id", "policy", "problem",  "d",          "costly_indices",
                                                  "switch_cost", "policy_params", "y0", "y_star", "best_y",
                                                  "gap",    "n_switches", "n_reuses", "final_cost"};

struct Cell {
  std::size_t id = 0;
  std::size_t problem = 0;
  std::size_t cost = 0;
  std::size_t policy = 0;
  int run = 0;
};

/// Canonical order: problem, switch cost, policy, run.
inline std::vector<Cell> enumerate_cells(const ExperimentConfig& cfg) {
  std::vector<Cell> cells;
  cells.reserve(cfg.problems.size() * cfg.switch_costs.size() * cfg.policies.size() *
                static_cast<std::size_t>(cfg.runs_per_cell));
  for (std::size_t p = 0; p < cfg.problems.size(); ++p) {
    for (std::size_t c = 0; c < cfg.switch_costs.size(); ++c) {
      for (std::size_t q = 0; q < cfg.policies.size(); ++q) {
        for (int r = 0; r < cfg.runs_per_cell; ++r) cells.push_back({cells.size(), p, c, q, r});
      }
    }
  }
  return cells;
}

inline std::uint64_t mix(std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = 0x73776230ULL;
  for (auto w : words) h = splitmix64(h ^ w);
  return h;
}

struct CellSeeds {
  std::uint64_t assignment = 0;
  std::uint64_t design = 0;
  std::uint64_t policy = 0;
};

inline CellSeeds seeds_for(std::uint64_t base, const Cell& cell) {
  const auto r = static_cast<std::uint64_t>(cell.run);
  return {base ^ mix({1, cell.problem, r}), base ^ mix({2, cell.problem, r}),
          base ^ mix({3, cell.problem, cell.cost, cell.policy, r})};
}

/// The problem instance of a cell: its costly dimensions depend only on the
/// problem index and the run index.
inline Problem problem_for(const ExperimentConfig& cfg, const Cell& cell, const YStarTable& table) {
  const ProblemSpec& spec = cfg.problems[cell.problem];
  Rng rng(seeds_for(cfg.base_seed, cell).assignment);
  return make_configuration(spec.name(), spec.d, spec.costly_count, rng, table);
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v + 0.0);
  return buf;
}

inline std::string format_indices(const std::vector<int>& idx) {
  std::string out;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(idx[i]);
  }
  return out;
}

inline std::string csv_header(std::span<const char* const> columns) {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ',';
    out += columns[i];
  }
  return out + '\n';
}

struct CellResult {
  Cell cell;
  PolicyConfig policy_config;
  std::string policy_label;
  std::string problem_name;
  int d = 0;
  std::string costly;
  double switch_cost = 0.0;
  GapSummary summary;
  std::string trace_csv;  // rows without header
  // best-so-far after each optimization step, for the cost curves
  std::vector<std::pair<double, double>> cost_best;
  double total_budget = 0.0;
  std::optional<double> shared_design_y0;  // nested runs only

  [[nodiscard]] std::string summary_csv() const {
    const std::string sep = ",";
    return std::to_string(cell.id) + sep + policy_label + sep + problem_name + sep + std::to_string(d) + sep + costly +
           sep + format_double(switch_cost) + sep + policy_config.params() + sep +
           format_double(summary.y0) + sep + format_double(summary.y_star) + sep + format_double(summary.best_y) + sep +
           format_double(summary.gap) + sep + std::to_string(summary.n_switches) + sep +
           std::to_string(summary.n_reuses) + sep + format_double(summary.final_cost) + "\n";
  }
};

inline CellResult run_cell(const ExperimentConfig& cfg, const Cell& cell, const YStarTable& table) {
  const CellSeeds seeds = seeds_for(cfg.base_seed, cell);
  const Problem problem = problem_for(cfg, cell, table);
  const PolicyConfig& config = cfg.policies[cell.policy];
  const double c_switch = cfg.switch_costs[cell.cost];
  const RunSettings settings = cfg.settings(c_switch);
  const Trace trace = run_policy(problem, config, settings, {seeds.design, seeds.policy});

  CellResult res;
  res.cell = cell;
  res.policy_config = config;
  res.policy_label = config.label();
  res.problem_name = problem.name();
  res.d = problem.d;
  res.costly = format_indices(problem.costly_indices);
  res.switch_cost = c_switch;
  res.summary = summarize_trace(trace, problem.y_star);
  res.total_budget = settings.total_budget(problem.d);
  if (config.is_nested()) {
    Rng rng(seeds.design);
    res.shared_design_y0 = shared_design(problem, rng).best_target();
  }

  const std::string prefix = std::to_string(cell.id) + "," + res.policy_label + "," + res.problem_name + "," +
                             std::to_string(res.d) + "," + res.costly + "," + format_double(c_switch) + ",";
  for (const auto& row : trace.rows) {
    const bool opt = row.phase == Phase::kOpt;
    res.trace_csv += prefix + std::to_string(row.t) + (opt ? ",opt," : ",init,") + (row.is_switch ? "1," : "0,") +
                     (row.degraded ? "1," : "0,") + format_double(row.step_cost) + "," +
                     format_double(row.cumulative_cost) + "," + format_double(row.y) + "," +
                     format_double(row.best_so_far) + "\n";
    if (opt) res.cost_best.emplace_back(row.cumulative_cost, row.best_so_far);
  }
  return res;
}

namespace experiment_detail {

/// Write through a temporary file and rename, so readers never see a
/// partially written result.
class AtomicFile {
 public:
  explicit AtomicFile(std::filesystem::path path)
      : path_(std::move(path)), tmp_(path_.string() + ".tmp"), out_(tmp_, std::ios::binary | std::ios::trunc) {
    if (!out_) throw std::runtime_error("cannot write '" + tmp_.string() + "'");
  }
  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;
  ~AtomicFile() {
    if (!committed_) {
      out_.close();
      std::error_code ec;
      std::filesystem::remove(tmp_, ec);
    }
  }

  std::ofstream& stream() { return out_; }
  void commit() {
    out_.close();
    if (!out_) throw std::runtime_error("write failed for '" + tmp_.string() + "'");
    std::filesystem::rename(tmp_, path_);
    committed_ = true;
  }

 private:
  std::filesystem::path path_;
  std::filesystem::path tmp_;
  std::ofstream out_;
  bool committed_ = false;
};

/// Mean gap per integer cost, per policy label, for one switch cost.
class CostCurves {
 public:
  void add(const CellResult& r) {
    auto& acc = by_policy_[r.policy_label];
    const auto budget = static_cast<std::size_t>(std::floor(r.total_budget));
    if (acc.sum.size() < budget + 1) {
      acc.sum.resize(budget + 1, 0.0);
      acc.count.resize(budget + 1, 0);
    }
    std::size_t next = 0;
    double best = r.summary.y0;
    for (std::size_t c = 0; c <= budget; ++c) {
      while (next < r.cost_best.size() && r.cost_best[next].first <= static_cast<double>(c)) {
        best = std::max(best, r.cost_best[next].second);
        ++next;
      }
      acc.sum[c] += gap_value(best, r.summary.y0, r.summary.y_star);
      acc.count[c] += 1;
    }
  }

  void write(std::ostream& out) const {
    out << "policy,cost,mean_gap\n";
    for (const auto& [label, acc] : by_policy_) {
      for (std::size_t c = 0; c < acc.sum.size(); ++c) {
        out << label << "," << c << "," << format_double(acc.sum[c] / static_cast<double>(acc.count[c])) << "\n";
      }
    }
  }

 private:
  struct Acc {
    std::vector<double> sum;
    std::vector<std::size_t> count;
  };
  std::map<std::string, Acc> by_policy_;
};

}  // namespace experiment_detail

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  for (const auto& p : cfg.problems) {
    j["problems"].push_back({{"function", p.name()}, {"d", p.d}, {"costly_count", p.costly_count}});
  }
  j["switch_costs"] = cfg.switch_costs;
  j["allowed_switch_costs"] = cfg.allowed_switch_costs;
  for (const auto& q : cfg.policies) j["policies"].push_back(q.label());
  j["runs_per_cell"] = cfg.runs_per_cell;
  j["base_seed"] = cfg.base_seed;
  j["n_multiplier"] = cfg.n_multiplier;
  j["optimizer"] = {{"raw_samples", cfg.optimizer.raw_samples},
                    {"acquisition_restarts", cfg.optimizer.acquisition_restarts},
                    {"fit_restarts", cfg.optimizer.fit_restarts}};
  return j;
}

struct RunOptions {
  unsigned jobs = 1;
  std::filesystem::path out_dir;
  /// Called from the collector thread after each cell is written.
  std::function<void(const CellResult&, std::size_t done, std::size_t total)> progress;
};

struct RunReport {
  std::size_t cells = 0;
  std::vector<std::filesystem::path> files;
};

/// Execute every cell on a pool of `jobs` workers. Results are written by a
/// single collector in canonical cell order, so the files do not depend on
/// scheduling.
inline RunReport run_experiment(const ExperimentConfig& cfg, const YStarTable& table, const RunOptions& opts) {
  namespace fs = std::filesystem;
  using experiment_detail::AtomicFile;
  const std::vector<Cell> cells = enumerate_cells(cfg);
  fs::create_directories(opts.out_dir);

  std::vector<std::optional<CellResult>> slots(cells.size());
  std::exception_ptr failure;
  std::mutex mu;
  std::condition_variable ready;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size() || stop.load()) return;
      try {
        CellResult r = run_cell(cfg, cells[i], table);
        std::lock_guard lock(mu);
        slots[i] = std::move(r);
      } catch (const std::exception& e) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::make_exception_ptr(std::runtime_error("cell " + std::to_string(i) + ": " + e.what()));
        stop = true;
      }
      ready.notify_all();
    }
  };

  const unsigned jobs = std::max(1u, opts.jobs);
  std::vector<std::jthread> pool;
  for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);

  AtomicFile trace_file(opts.out_dir / "trace.csv");
  AtomicFile summary_file(opts.out_dir / "summary.csv");
  trace_file.stream() << csv_header(kTraceColumns);
  summary_file.stream() << csv_header(kSummaryColumns);
  std::map<double, experiment_detail::CostCurves> curves;
  nlohmann::json nested_y0 = nlohmann::json::array();
  nlohmann::json degenerate = nlohmann::json::array();

  for (std::size_t i = 0; i < cells.size(); ++i) {
    CellResult r;
    {
      std::unique_lock lock(mu);
      ready.wait(lock, [&] { return slots[i].has_value() || failure != nullptr; });
      if (failure) break;
      r = std::move(*slots[i]);
      slots[i].reset();
    }
    trace_file.stream() << r.trace_csv;
    summary_file.stream() << r.summary_csv();
    curves[r.switch_cost].add(r);
    if (r.shared_design_y0) {
      nested_y0.push_back({{"run_id", r.cell.id}, {"y0", r.summary.y0}, {"shared_design_y0", *r.shared_design_y0}});
    }
    if (r.summary.degenerate) degenerate.push_back(r.cell.id);
    if (opts.progress) opts.progress(r, i + 1, cells.size());
  }
  stop = true;
  pool.clear();
  if (failure) std::rethrow_exception(failure);

  RunReport report;
  report.cells = cells.size();
  trace_file.commit();
  summary_file.commit();
  report.files = {opts.out_dir / "trace.csv", opts.out_dir / "summary.csv"};

  for (const auto& [cost, curve] : curves) {
    const fs::path path = curves.size() == 1 ? opts.out_dir / "gap_vs_cost.csv"
                                             : opts.out_dir / ("gap_vs_cost_c" + format_double(cost) + ".csv");
    AtomicFile f(path);
    curve.write(f.stream());
    f.commit();
    report.files.push_back(path);
  }

  nlohmann::json meta;
  meta["config"] = config_to_json(cfg);
  meta["cells"] = cells.size();
  meta["seed_formula"] =
      "mix(w...) folds h <- splitmix64(h ^ w) from h = 0x73776230; assignment = base ^ mix(1, problem, r); "
      "design = base ^ mix(2, problem, r); policy = base ^ mix(3, problem, cost, policy, r)";
  meta["notes"] = {
      "Costly dimensions and the initial design of run r are shared by all policies and switch costs of a problem.",
      "Nested runs start from their own n-by-k design, so their y0 differs from the shared design; gap uses the "
      "per-policy y0 and nested_design_y0 lists both values.",
      "Runs listed in degenerate_runs had y_star within 1e-12 of y0 and report gap = 1."};
  meta["nested_design_y0"] = nested_y0;
  meta["degenerate_runs"] = degenerate;
  AtomicFile mf(opts.out_dir / "metadata.json");
  mf.stream() << meta.dump(2) << "\n";
  mf.commit();
  report.files.push_back(opts.out_dir / "metadata.json");
  return report;
}

struct DryRunReport {
  std::size_t cells = 0;
  std::size_t problems = 0;
  std::size_t switch_costs = 0;
  std::size_t policies = 0;
  int runs = 0;
  std::vector<std::string> policy_labels;
};

inline DryRunReport dry_run(const ExperimentConfig& cfg) {
  DryRunReport r;
  r.cells = enumerate_cells(cfg).size();
  r.problems = cfg.problems.size();
  r.switch_costs = cfg.switch_costs.size();
  r.policies = cfg.policies.size();
  r.runs = cfg.runs_per_cell;
  for (const auto& p : cfg.policies) r.policy_labels.push_back(p.label());
  return r;
}

}  // namespace swbo::harness

#endif  // SWBO_HARNESS_EXPERIMENT_HPP
