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

#ifndef SWBO_METRICS_HPP
#define SWBO_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "swbo/core.hpp"

namespace swbo {

enum class Phase { kInit, kOpt };

struct TraceRow {
  int t = 0;
  Phase phase = Phase::kInit;
  Vector point;
  double y = 0.0;
  double step_cost = 0.0;
  double cumulative_cost = 0.0;
  bool is_switch = false;
  bool degraded = false;  // an unaffordable switch was turned into a reuse
  bool fallback = false;  // nested policy drew its setup at random
  double best_so_far = 0.0;
};

/// Evaluation history of one run, initialization rows first.
struct Trace {
  std::vector<TraceRow> rows;

  void append_init(Vector x, double y) {
    TraceRow row;
    row.t = static_cast<int>(rows.size());
    row.phase = Phase::kInit;
    row.point = std::move(x);
    row.y = y;
    row.best_so_far = rows.empty() ? y : std::max(rows.back().best_so_far, y);
    rows.push_back(std::move(row));
  }

  void append_opt(TraceRow row) {
    row.phase = Phase::kOpt;
    const double prev_cost = rows.empty() ? 0.0 : rows.back().cumulative_cost;
    row.cumulative_cost = prev_cost + row.step_cost;
    row.best_so_far = rows.empty() ? row.y : std::max(rows.back().best_so_far, row.y);
    rows.push_back(std::move(row));
  }

  [[nodiscard]] std::size_t init_count() const {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [](const TraceRow& r) { return r.phase == Phase::kInit; }));
  }
  [[nodiscard]] std::size_t opt_count() const { return rows.size() - init_count(); }

  /// Best target over the initialization rows.
  [[nodiscard]] double y0() const {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
      if (r.phase == Phase::kInit) best = std::max(best, r.y);
    }
    return best;
  }

  [[nodiscard]] double best() const { return rows.empty() ? -std::numeric_limits<double>::infinity() : rows.back().best_so_far; }
  [[nodiscard]] double final_cost() const { return rows.empty() ? 0.0 : rows.back().cumulative_cost; }

  [[nodiscard]] std::int64_t switches() const {
    return std::count_if(rows.begin(), rows.end(), [](const TraceRow& r) { return r.phase == Phase::kOpt && r.is_switch; });
  }
  [[nodiscard]] std::int64_t reuses() const {
    return std::count_if(rows.begin(), rows.end(), [](const TraceRow& r) { return r.phase == Phase::kOpt && !r.is_switch; });
  }
};

/// y_star does not exceed y0: the initialization already holds the optimum.
struct DegenerateProblem : std::domain_error {
  using std::domain_error::domain_error;
};

inline constexpr double kGapDegenerateTolerance = 1e-12;

/// (best - y0) / (y_star - y0). Reports 1 when y_star equals y0 to within 1e-12.
inline double gap_value(double best, double y0, double y_star) {
  const double denom = y_star - y0;
  if (std::abs(denom) <= kGapDegenerateTolerance) return 1.0;
  if (denom < 0.0) throw DegenerateProblem("gap: y_star is below the initialization best");
  return std::clamp((best - y0) / denom, 0.0, 1.0);
}

inline bool gap_is_degenerate(double y0, double y_star) {
  return std::abs(y_star - y0) <= kGapDegenerateTolerance;
}

inline double gap(const Trace& trace, double y_star) {
  if (trace.rows.empty()) throw std::invalid_argument("gap: empty trace");
  return gap_value(trace.best(), trace.y0(), y_star);
}

struct GapPoint {
  double cost = 0.0;
  double gap = 0.0;
};

/// Step function of the gap against cumulative cost: at cost c it uses every
/// row whose cumulative cost is <= c.
inline std::vector<GapPoint> gap_curve(const Trace& trace, double y_star, std::span<const double> cost_grid) {
  if (!std::is_sorted(cost_grid.begin(), cost_grid.end())) {
    throw std::invalid_argument("gap_curve: cost grid must be sorted");
  }
  const double y0 = trace.y0();
  std::vector<GapPoint> out;
  out.reserve(cost_grid.size());
  std::size_t next = 0;
  double best = y0;
  for (double c : cost_grid) {
    while (next < trace.rows.size() && trace.rows[next].cumulative_cost <= c) {
      best = std::max(best, trace.rows[next].y);
      ++next;
    }
    out.push_back({c, gap_value(best, y0, y_star)});
  }
  return out;
}

struct GapSummary {
  double gap = 0.0;
  double y0 = 0.0;
  double y_star = 0.0;
  double best_y = 0.0;
  double final_cost = 0.0;
  std::int64_t n_switches = 0;
  std::int64_t n_reuses = 0;
  bool degenerate = false;
};

inline GapSummary summarize_trace(const Trace& trace, double y_star) {
  GapSummary s;
  s.y0 = trace.y0();
  s.y_star = y_star;
  s.best_y = trace.best();
  s.gap = gap(trace, y_star);
  s.final_cost = trace.final_cost();
  s.n_switches = trace.switches();
  s.n_reuses = trace.reuses();
  s.degenerate = gap_is_degenerate(s.y0, y_star);
  return s;
}

struct Aggregate {
  double mean = 0.0;
  double ci_halfwidth = 0.0;  // 95%, Student t with n-1 degrees of freedom; NaN for n = 1
  double median = 0.0;
};

inline Aggregate aggregate(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("aggregate: no values");
  const auto n = values.size();
  Aggregate a;
  double sum = 0.0;
  for (double v : values) sum += v;
  a.mean = sum / static_cast<double>(n);
  if (n >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - a.mean) * (v - a.mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    const boost::math::students_t dist(static_cast<double>(n - 1));
    a.ci_halfwidth = boost::math::quantile(dist, 0.975) * sd / std::sqrt(static_cast<double>(n));
  } else {
    a.ci_halfwidth = std::numeric_limits<double>::quiet_NaN();
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  a.median = (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  return a;
}

inline Aggregate aggregate(std::span<const GapSummary> runs) {
  std::vector<double> gaps;
  gaps.reserve(runs.size());
  for (const auto& r : runs) gaps.push_back(r.gap);
  return aggregate(std::span<const double>(gaps));
}

}  // namespace swbo

#endif  // SWBO_METRICS_HPP
