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

#ifndef SWBO_POLICIES_HPP
#define SWBO_POLICIES_HPP

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "swbo/acquisition.hpp"
#include "swbo/core.hpp"
#include "swbo/cost.hpp"
#include "swbo/gp.hpp"
#include "swbo/metrics.hpp"
#include "swbo/problems.hpp"

namespace swbo {

/// Classic BO: full-space EI every step, blind to the switching cost.
struct VanillaBO {};

/// Reuse the current setup with probability p, otherwise take a full-space step.
struct PReuse {
  double p = 0.5;
};

/// Switch on every k-th post-initialization step (t mod k == 0), reuse otherwise.
struct Periodic {
  int k = 1;
};

/// Two-level policy: a GP over the costly subspace, trained on the best value
/// seen under each setup, picks a setup every k steps; in between, EI over the
/// cheap coordinates is conditioned on that setup.
struct Nested {
  int n = 3;
  int k = 2;
};

/// Two candidates per step (reuse and full-space), each scored by EI / cost^gamma.
struct EipuCool {};

using PolicyVariant = std::variant<VanillaBO, PReuse, Periodic, Nested, EipuCool>;

struct PolicyConfig {
  PolicyVariant variant;

  PolicyConfig() = default;
  template <typename T, typename = std::enable_if_t<!std::is_same_v<std::decay_t<T>, PolicyConfig>>>
  PolicyConfig(T v) : variant(std::move(v)) {  // NOLINT(google-explicit-constructor)
    validate();
  }

  void validate() const {
    std::visit(
        [](const auto& v) {
          using V = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<V, PReuse>) {
            if (!(v.p >= 0.0 && v.p <= 1.0)) throw InvalidArgument("PReuse: p must lie in [0, 1]");
          } else if constexpr (std::is_same_v<V, Periodic>) {
            if (v.k < 1) throw InvalidArgument("Periodic: k must be >= 1");
          } else if constexpr (std::is_same_v<V, Nested>) {
            if (v.n < 2) throw InvalidArgument("Nested: n must be >= 2");
            if (v.k < 1) throw InvalidArgument("Nested: k must be >= 1");
          }
        },
        variant);
  }

  [[nodiscard]] std::string name() const {
    static constexpr const char* kNames[] = {"vanilla", "preuse", "periodic", "nested", "eipu"};
    return kNames[variant.index()];
  }

  [[nodiscard]] std::string params() const {
    char buf[64];
    if (const auto* v = std::get_if<PReuse>(&variant)) {
      std::snprintf(buf, sizeof(buf), "p=%g", v->p);
      return buf;
    }
    if (const auto* v = std::get_if<Periodic>(&variant)) return "k=" + std::to_string(v->k);
    if (const auto* v = std::get_if<Nested>(&variant)) {
      return "n=" + std::to_string(v->n) + ";k=" + std::to_string(v->k);
    }
    return "none";
  }

  [[nodiscard]] std::string label() const {
    const auto p = params();
    return p == "none" ? name() : name() + "(" + p + ")";
  }

  [[nodiscard]] bool is_nested() const { return std::holds_alternative<Nested>(variant); }
};

struct RunSettings {
  int n_multiplier = 10;  // N = n_multiplier * d switches
  double c_switch = 1.0;
  double equality_tolerance = 0.0;
  AcquisitionOptions acquisition;
  FitOptions fit;
  /// Seed each refit with the previous hyperparameters as an extra start.
  bool warm_start = true;

  [[nodiscard]] double total_budget(int d) const { return static_cast<double>(n_multiplier * d) * c_switch; }
};

enum class Intent { kSwitch, kReuse };

/// Switch/reuse decision of the schedule-driven policies (vanilla, pReuse,
/// periodic) at post-initialization step t. Consumes one uniform draw for pReuse.
inline Intent schedule_intent(const PolicyConfig& config, long t, Rng& rng) {
  return std::visit(
      [&](const auto& v) -> Intent {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, PReuse>) {
          return uniform01(rng) < v.p ? Intent::kReuse : Intent::kSwitch;
        } else if constexpr (std::is_same_v<V, Periodic>) {
          return t % v.k == 0 ? Intent::kSwitch : Intent::kReuse;
        } else if constexpr (std::is_same_v<V, VanillaBO>) {
          return Intent::kSwitch;
        } else {
          throw InvalidArgument("schedule_intent: policy has no fixed schedule");
        }
      },
      config.variant);
}

/// Per-setup best values: one row per distinct costly vector in `data`,
/// in order of first appearance.
inline Dataset costly_dataset(const Dataset& data, const std::vector<int>& costly_indices) {
  Dataset out;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Vector c = gather(data.points[i], costly_indices);
    bool found = false;
    for (std::size_t j = 0; j < out.size(); ++j) {
      if (out.points[j] == c) {
        out.targets[j] = std::max(out.targets[j], data.targets[i]);
        found = true;
        break;
      }
    }
    if (!found) out.add(c, data.targets[i]);
  }
  return out;
}

/// EIPU selection: true when the full-space candidate outscores the reuse
/// candidate under EI / cost^gamma. Ties keep the cheaper reuse.
inline bool eipu_prefers_switch(double reuse_ei, double switch_ei, double switch_cost, double g) {
  return cost_cooled(switch_ei, switch_cost, g) > cost_cooled(reuse_ei, 1.0, g);
}

/// Mutable state of one optimization run. Owned by a single worker.
class RunState {
 public:
  RunState(Problem problem, PolicyConfig config, RunSettings settings, const Dataset& init, Rng rng)
      : problem_(std::move(problem)),
        config_(std::move(config)),
        settings_(std::move(settings)),
        data_(init),
        ledger_(settings_.total_budget(problem_.d), CostModel(settings_.c_switch, settings_.equality_tolerance),
                problem_.costly_part(init.points.back())),
        rng_(std::move(rng)),
        setup_(ledger_.current_setup()) {
    config_.validate();
    for (std::size_t i = 0; i < init.size(); ++i) {
      check_y_star(init.targets[i]);
      trace_.append_init(init.points[i], init.targets[i]);
    }
  }

  [[nodiscard]] const Problem& problem() const { return problem_; }
  [[nodiscard]] const Dataset& data() const { return data_; }
  [[nodiscard]] const BudgetLedger& ledger() const { return ledger_; }
  [[nodiscard]] const Trace& trace() const { return trace_; }
  [[nodiscard]] long t() const { return t_; }
  [[nodiscard]] bool finished() const { return finished_; }
  [[nodiscard]] double incumbent() const { return data_.best_target(); }

  /// One evaluation. Returns the new trace row, or nullopt once the budget
  /// cannot pay for even a reuse step.
  std::optional<TraceRow> step() {
    if (finished_) return std::nullopt;
    if (!ledger_.can_afford(ChargeKind::kReuse)) {
      finished_ = true;
      return std::nullopt;
    }
    return std::visit(
        [&](const auto& v) -> std::optional<TraceRow> {
          using V = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<V, Nested>) {
            return step_nested(v);
          } else if constexpr (std::is_same_v<V, EipuCool>) {
            return step_eipu();
          } else {
            return step_scheduled(schedule_intent(config_, t_, rng_));
          }
        },
        config_.variant);
  }

  void run_to_completion() {
    while (step()) {
    }
  }

 private:
  GPModel fit_full() {
    FitOptions opts = settings_.fit;
    if (settings_.warm_start && last_params_) opts.warm_start = last_params_;
    GPModel model = fit(data_, problem_.bounds, rng_, opts);
    last_params_ = model.params();
    return model;
  }

  std::map<int, double> pins_for(const Vector& setup) const {
    std::map<int, double> pins;
    for (std::size_t c = 0; c < problem_.costly_indices.size(); ++c) {
      pins[problem_.costly_indices[c]] = setup(static_cast<Eigen::Index>(c));
    }
    return pins;
  }

  AcquisitionResult best_reuse(const GPModel& model, const Vector& setup) {
    return optimize_acquisition(AcquisitionQuery(model, pins_for(setup)), rng_, settings_.acquisition);
  }

  AcquisitionResult best_anywhere(const GPModel& model) {
    return optimize_acquisition(AcquisitionQuery(model), rng_, settings_.acquisition);
  }

  void check_y_star(double y) const {
    if (y > problem_.y_star + 1e-9 * (1.0 + std::abs(problem_.y_star))) {
      throw std::logic_error("observed value exceeds y_star for " + problem_.name());
    }
  }

  TraceRow commit(const Vector& x, bool degraded, bool fallback = false) {
    const double y = problem_.evaluate(x);
    check_y_star(y);
    const Vector costly = problem_.costly_part(x);
    const bool sw = is_switch(ledger_.current_setup(), costly, ledger_.cost_model().equality_tolerance);
    if (!ledger_.charge_move(costly)) {
      throw std::logic_error("policy committed an unaffordable evaluation");
    }
    data_.add(x, y);
    TraceRow row;
    row.t = static_cast<int>(t_);
    row.point = x;
    row.y = y;
    row.step_cost = sw ? ledger_.cost_model().c_switch : 1.0;
    row.is_switch = sw;
    row.degraded = degraded;
    row.fallback = fallback;
    trace_.append_opt(row);
    ++t_;
    return trace_.rows.back();
  }

  TraceRow step_scheduled(Intent intent) {
    const GPModel model = fit_full();
    bool degraded = false;
    if (intent == Intent::kSwitch && !ledger_.can_afford(ChargeKind::kSwitch)) {
      intent = Intent::kReuse;
      degraded = true;
    }
    const auto candidate =
        intent == Intent::kReuse ? best_reuse(model, ledger_.current_setup()) : best_anywhere(model);
    return commit(candidate.point, degraded);
  }

  TraceRow step_eipu() {
    const GPModel model = fit_full();
    const double g = gamma(CoolingState{ledger_.total(), ledger_.spent()});
    const auto reuse = best_reuse(model, ledger_.current_setup());
    const auto fresh = best_anywhere(model);
    const double fresh_cost = step_cost(ledger_.current_setup(), problem_.costly_part(fresh.point), ledger_.cost_model());
    if (eipu_prefers_switch(reuse.ei, fresh.ei, fresh_cost, g)) {
      const bool affordable = fresh_cost == 1.0 || ledger_.can_afford(ChargeKind::kSwitch);
      if (affordable) return commit(fresh.point, false);
      return commit(reuse.point, true);
    }
    return commit(reuse.point, false);
  }

  TraceRow step_nested(const Nested& cfg) {
    const long t_global = static_cast<long>(trace_.init_count()) + t_;
    bool degraded = false;
    bool fallback = false;
    if (t_global % cfg.k == 0) {
      Vector next_setup;
      const Dataset per_setup = costly_dataset(data_, problem_.costly_indices);
      const Bounds costly_box = problem_.costly_bounds();
      if (per_setup.size() >= 2) {
        const GPModel outer = fit(per_setup, costly_box, rng_, settings_.fit);
        next_setup = optimize_acquisition(AcquisitionQuery(outer), rng_, settings_.acquisition).point;
      } else {
        next_setup = uniform_point(rng_, costly_box);
        fallback = true;
      }
      const bool sw = is_switch(ledger_.current_setup(), next_setup, ledger_.cost_model().equality_tolerance);
      if (sw && !ledger_.can_afford(ChargeKind::kSwitch)) {
        degraded = true;
      } else {
        setup_ = next_setup;
      }
    }
    const GPModel model = fit_full();
    const auto candidate = best_reuse(model, setup_);
    return commit(candidate.point, degraded, fallback);
  }

  Problem problem_;
  PolicyConfig config_;
  RunSettings settings_;
  Dataset data_;
  BudgetLedger ledger_;
  Rng rng_;
  Trace trace_;
  Vector setup_;  // nested: the setup chosen by the outer GP
  std::optional<KernelParams> last_params_;
  long t_ = 0;
  bool finished_ = false;
};

struct RunSeeds {
  std::uint64_t init = 0;    // shared across policies for the same problem and run index
  std::uint64_t policy = 0;  // drives the policy's own randomness
};

/// Initialization for a policy: the shared uniform design, or the nested
/// n-setups-by-k design for the nested policy.
inline Dataset design_for(const Problem& problem, const PolicyConfig& config, std::uint64_t init_seed) {
  Rng rng(init_seed);
  if (const auto* nested = std::get_if<Nested>(&config.variant)) {
    return nested_design(problem, nested->n, nested->k, rng);
  }
  return shared_design(problem, rng);
}

inline Trace run_policy(const Problem& problem, const PolicyConfig& config, const RunSettings& settings,
                        const RunSeeds& seeds) {
  RunState state(problem, config, settings, design_for(problem, config, seeds.init), Rng(seeds.policy));
  state.run_to_completion();
  return state.trace();
}

}  // namespace swbo

#endif  // SWBO_POLICIES_HPP
