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

#ifndef SWBO_COST_HPP
#define SWBO_COST_HPP

#include <cmath>
#include <cstdint>

#include "swbo/core.hpp"

namespace swbo {

/// Switching-cost model: an evaluation that changes any costly coordinate
/// costs `c_switch`, one that keeps them all costs 1.
struct CostModel {
  double c_switch = 1.0;
  double equality_tolerance = 0.0;

  CostModel() = default;
  explicit CostModel(double c, double tol = 0.0) : c_switch(c), equality_tolerance(tol) {
    if (!(c >= 1.0) || !std::isfinite(c)) throw InvalidArgument("CostModel: c_switch must be >= 1");
    if (!(tol >= 0.0)) throw InvalidArgument("CostModel: equality_tolerance must be >= 0");
  }
};

inline bool is_switch(const Vector& prev_costly, const Vector& next_costly, double tol) {
  if (prev_costly.size() != next_costly.size()) throw InvalidArgument("is_switch: length mismatch");
  if (prev_costly.size() == 0) return false;
  return (prev_costly - next_costly).cwiseAbs().maxCoeff() > tol;
}

inline double step_cost(const Vector& prev_costly, const Vector& next_costly, const CostModel& model) {
  return is_switch(prev_costly, next_costly, model.equality_tolerance) ? model.c_switch : 1.0;
}

enum class ChargeKind { kReuse, kSwitch };

/// Spent budget is derived from the counters, so
/// spent == n_switches * c_switch + n_reuses holds exactly.
class BudgetLedger {
 public:
  BudgetLedger(double total, CostModel model, Vector current_setup)
      : total_(total), model_(model), current_setup_(std::move(current_setup)) {
    if (!(total > 0.0)) throw InvalidArgument("BudgetLedger: total budget must be positive");
  }

  [[nodiscard]] double total() const { return total_; }
  [[nodiscard]] double spent() const {
    return static_cast<double>(n_switches_) * model_.c_switch + static_cast<double>(n_reuses_);
  }
  [[nodiscard]] double remaining() const { return total_ - spent(); }
  [[nodiscard]] std::int64_t n_switches() const { return n_switches_; }
  [[nodiscard]] std::int64_t n_reuses() const { return n_reuses_; }
  [[nodiscard]] const CostModel& cost_model() const { return model_; }
  [[nodiscard]] const Vector& current_setup() const { return current_setup_; }

  [[nodiscard]] double cost_of(ChargeKind kind) const { return kind == ChargeKind::kSwitch ? model_.c_switch : 1.0; }
  [[nodiscard]] bool can_afford(ChargeKind kind) const { return spent() + cost_of(kind) <= total_; }

  /// Charge one evaluation. Returns false (budget exhausted) without mutating
  /// anything when the charge does not fit.
  bool charge(ChargeKind kind) {
    if (!can_afford(kind)) return false;
    if (kind == ChargeKind::kSwitch) {
      ++n_switches_;
    } else {
      ++n_reuses_;
    }
    return true;
  }

  /// Charge an evaluation at `costly` and make it the current setup.
  bool charge_move(const Vector& costly) {
    const auto kind =
        is_switch(current_setup_, costly, model_.equality_tolerance) ? ChargeKind::kSwitch : ChargeKind::kReuse;
    if (!charge(kind)) return false;
    current_setup_ = costly;
    return true;
  }

 private:
  double total_;
  CostModel model_;
  Vector current_setup_;
  std::int64_t n_switches_ = 0;
  std::int64_t n_reuses_ = 0;
};

}  // namespace swbo

#endif  // SWBO_COST_HPP
