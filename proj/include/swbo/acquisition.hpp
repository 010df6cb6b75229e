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

#ifndef SWBO_ACQUISITION_HPP
#define SWBO_ACQUISITION_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <vector>

#include <boost/random/sobol.hpp>

#include "swbo/core.hpp"
#include "swbo/gp.hpp"
#include "swbo/optimize.hpp"

namespace swbo {

inline double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// Closed-form expected improvement for maximization.
inline double expected_improvement(double mean, double std_dev, double incumbent) {
  const double improvement = mean - incumbent;
  if (!(std_dev >= 1e-12)) return std::max(improvement, 0.0);
  const double z = improvement / std_dev;
  return std::max(0.0, std_dev * (z * normal_cdf(z) + normal_pdf(z)));
}

/// Budget state that drives the cost-cooling exponent.
struct CoolingState {
  double total_budget = 1.0;
  double spent = 0.0;
};

/// gamma = (B - B_t) / B clamped to [0, 1].
inline double gamma(const CoolingState& state) {
  if (!(state.total_budget > 0.0)) throw InvalidArgument("gamma: total budget must be positive");
  return std::clamp((state.total_budget - state.spent) / state.total_budget, 0.0, 1.0);
}

/// EI-cool = EI / cost^gamma.
inline double cost_cooled(double ei, double cost, double gamma_value) {
  return ei / std::pow(cost, gamma_value);
}

struct AcquisitionOptions {
  int raw_samples = 2048;
  int restarts = 10;
  double fd_step = 1e-6;  // unit-cube coordinates
  int max_iterations = 200;
};

/// What to maximize: EI of `model` over `domain`, with the coordinates in
/// `pinned` held at fixed values.
struct AcquisitionQuery {
  const GPModel& model;
  double incumbent;
  Bounds domain;
  std::map<int, double> pinned;

  explicit AcquisitionQuery(const GPModel& m) : model(m), incumbent(m.incumbent()), domain(m.bounds()) {}
  AcquisitionQuery(const GPModel& m, std::map<int, double> pins)
      : model(m), incumbent(m.incumbent()), domain(m.bounds()), pinned(std::move(pins)) {}
};

struct AcquisitionResult {
  Vector point;
  double ei = 0.0;
};

/// EI at a point in original coordinates.
inline double acquisition_value(const AcquisitionQuery& query, const Vector& x) {
  const auto p = query.model.predict(x);
  return expected_improvement(p.mean, std::sqrt(p.variance), query.incumbent);
}

namespace acq_detail {

/// Scrambled Sobol points in [0,1)^dim; scrambling is a random digital shift.
inline Matrix sobol_points(int dim, int count, Rng& rng) {
  boost::random::sobol engine(static_cast<std::size_t>(dim));
  std::vector<std::uint64_t> shift(static_cast<std::size_t>(dim));
  for (auto& s : shift) s = rng();
  Matrix out(dim, count);
  for (int j = 0; j < count; ++j) {
    for (int i = 0; i < dim; ++i) {
      // the engine starts after the origin; emit it first so powers of two form a full net
      const std::uint64_t raw = j == 0 ? 0 : static_cast<std::uint64_t>(engine());
      const std::uint64_t v = raw ^ shift[static_cast<std::size_t>(i)];
      out(i, j) = static_cast<double>(v >> 11) * 0x1.0p-53;
    }
  }
  return out;
}

}  // namespace acq_detail

/// Multi-start EI maximization: quasi-random raw samples over the free
/// coordinates, the best `restarts` of them refined by bounded quasi-Newton
/// with central-difference gradients. Pinned coordinates are returned
/// bit-identical to their pins.
inline AcquisitionResult optimize_acquisition(const AcquisitionQuery& query, Rng& rng,
                                              const AcquisitionOptions& options = {}) {
  const Bounds& domain = query.domain;
  const int d = domain.dim();
  if (d != query.model.dim()) throw InvalidArgument("optimize_acquisition: domain/model dimension mismatch");
  std::vector<int> free_dims;
  for (int i = 0; i < d; ++i) {
    if (!query.pinned.contains(i)) free_dims.push_back(i);
  }
  for (const auto& [idx, value] : query.pinned) {
    if (idx < 0 || idx >= d) throw InvalidArgument("optimize_acquisition: pinned index out of range");
    if (!(value >= domain.lower(idx) && value <= domain.upper(idx))) {
      throw InvalidArgument("optimize_acquisition: pinned value outside the domain");
    }
  }
  if (free_dims.empty()) throw InvalidArgument("optimize_acquisition: every dimension is pinned");
  const int m = static_cast<int>(free_dims.size());

  Vector base(d);
  for (const auto& [idx, value] : query.pinned) base(idx) = value;

  auto assemble = [&](const Vector& u_free) {
    Vector x = base;
    for (int i = 0; i < m; ++i) {
      const int k = free_dims[static_cast<std::size_t>(i)];
      x(k) = std::clamp(domain.lower(k) + u_free(i) * (domain.upper(k) - domain.lower(k)), domain.lower(k),
                        domain.upper(k));
    }
    return x;
  };

  const Matrix raw = acq_detail::sobol_points(m, options.raw_samples, rng);
  Matrix unit(d, options.raw_samples);
  std::vector<Vector> candidates;
  candidates.reserve(static_cast<std::size_t>(options.raw_samples));
  for (int j = 0; j < options.raw_samples; ++j) {
    Vector x = assemble(raw.col(j));
    unit.col(j) = query.model.bounds().to_unit(x);
    candidates.push_back(std::move(x));
  }
  const auto preds = query.model.predict_unit_batch(unit);
  std::vector<double> raw_ei(preds.size());
  for (std::size_t j = 0; j < preds.size(); ++j) {
    raw_ei[j] = expected_improvement(preds[j].mean, std::sqrt(preds[j].variance), query.incumbent);
  }

  std::vector<int> order(raw_ei.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return raw_ei[a] > raw_ei[b]; });
  const int n_refine = std::min(options.restarts, options.raw_samples);

  const Vector lo = Vector::Zero(m);
  const Vector hi = Vector::Ones(m);
  opt::LbfgsOptions local;
  local.max_iterations = options.max_iterations;
  local.gradient_tolerance = 1e-9;
  local.function_tolerance = 1e-12;

  AcquisitionResult best{candidates[static_cast<std::size_t>(order.front())], raw_ei[static_cast<std::size_t>(order.front())]};
  bool have_best = false;
  for (int r = 0; r < n_refine; ++r) {
    const auto j = static_cast<std::size_t>(order[static_cast<std::size_t>(r)]);
    Vector point = candidates[j];
    double value = raw_ei[j];
    if (value > 0.0) {
      // EI is rescaled by its start value so the tolerances are scale free
      const double scale = value;
      auto neg_ei = [&](const Vector& u) { return -acquisition_value(query, assemble(u)) / scale; };
      auto objective = opt::with_central_differences(neg_ei, lo, hi, options.fd_step);
      const auto res = opt::minimize_box(objective, raw.col(static_cast<Eigen::Index>(j)), lo, hi, local);
      Vector refined = assemble(res.x);
      const double refined_value = acquisition_value(query, refined);
      if (refined_value > value) {
        point = std::move(refined);
        value = refined_value;
      }
    }
    if (!have_best || value > best.ei) {
      best = {std::move(point), value};
      have_best = true;
    }
  }
  for (const auto& [idx, pin] : query.pinned) best.point(idx) = pin;
  return best;
}

}  // namespace swbo

#endif  // SWBO_ACQUISITION_HPP
