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

#ifndef SWBO_OPTIMIZE_HPP
#define SWBO_OPTIMIZE_HPP

#include <cmath>
#include <deque>
#include <limits>

#include "swbo/core.hpp"

namespace swbo::opt {

struct LbfgsOptions {
  int max_iterations = 200;
  int history = 8;
  double gradient_tolerance = 1e-8;  // on the projected gradient, infinity norm
  double function_tolerance = 1e-12;  // relative decrease
  int max_backtracks = 40;
};

struct LbfgsResult {
  Vector x;
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

/// Bound-constrained limited-memory quasi-Newton minimizer.
///
/// `fun(x, grad)` returns f(x) and writes the gradient. The search direction is
/// the L-BFGS two-loop recursion restricted to the variables that are not held
/// at an active bound; the step is projected back onto the box and accepted
/// by an Armijo backtracking test along the projected path.
template <typename Fun>
LbfgsResult minimize_box(Fun&& fun, Vector x0, const Vector& lower, const Vector& upper,
                         const LbfgsOptions& options = {}) {
  const Eigen::Index n = x0.size();
  Vector x = x0.cwiseMax(lower).cwiseMin(upper);
  Vector g(n);
  double f = fun(x, g);
  LbfgsResult result{x, f, 0};
  if (!std::isfinite(f)) return result;

  std::deque<Vector> s_hist, y_hist;
  std::deque<double> rho_hist;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    result.iterations = iter + 1;

    Vector projected = (x - g).cwiseMax(lower).cwiseMin(upper) - x;
    if (projected.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) break;

    // variables pinned at a bound with the gradient pointing outward stay fixed
    Eigen::Array<bool, Eigen::Dynamic, 1> free(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      free(i) = !((x(i) <= lower(i) && g(i) > 0.0) || (x(i) >= upper(i) && g(i) < 0.0));
    }
    auto mask = [&](Vector v) {
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!free(i)) v(i) = 0.0;
      }
      return v;
    };

    Vector q = mask(g);
    std::vector<double> alpha(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      alpha[i] = rho_hist[i] * mask(s_hist[i]).dot(q);
      q -= alpha[i] * mask(y_hist[i]);
    }
    if (!s_hist.empty()) {
      const Vector& s = s_hist.back();
      const Vector& y = y_hist.back();
      const double yy = y.squaredNorm();
      if (yy > 0.0) q *= s.dot(y) / yy;
    } else {
      const double gn = q.lpNorm<Eigen::Infinity>();
      if (gn > 0.0) q /= std::max(1.0, gn);
    }
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * mask(y_hist[i]).dot(q);
      q += (alpha[i] - beta) * mask(s_hist[i]);
    }
    Vector direction = mask(-q);
    if (direction.dot(g) >= 0.0) {
      direction = mask(-g);
      const double gn = direction.lpNorm<Eigen::Infinity>();
      if (gn > 0.0) direction /= std::max(1.0, gn);
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }

    double step = 1.0;
    Vector x_new(n), g_new(n);
    double f_new = f;
    bool accepted = false;
    for (int bt = 0; bt < options.max_backtracks; ++bt) {
      x_new = (x + step * direction).cwiseMax(lower).cwiseMin(upper);
      f_new = fun(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * g.dot(x_new - x)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    Vector s = x_new - x;
    Vector y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * std::max(1.0, y.squaredNorm())) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > options.history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }

    const double decrease = f - f_new;
    x = x_new;
    g = g_new;
    f = f_new;
    if (decrease <= options.function_tolerance * std::max(1.0, std::abs(f))) break;
  }

  result.x = x;
  result.value = f;
  return result;
}

/// Central-difference gradient wrapper around a scalar function, staying inside the box.
template <typename Scalar>
auto with_central_differences(Scalar scalar, Vector lower, Vector upper, double h) {
  return [scalar = std::move(scalar), lower = std::move(lower), upper = std::move(upper), h](
             const Vector& x, Vector& grad) {
    const double f = scalar(x);
    grad.resize(x.size());
    Vector probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double hi = std::min(x(i) + h, upper(i));
      const double lo = std::max(x(i) - h, lower(i));
      probe(i) = hi;
      const double f_hi = scalar(probe);
      probe(i) = lo;
      const double f_lo = scalar(probe);
      probe(i) = x(i);
      grad(i) = hi > lo ? (f_hi - f_lo) / (hi - lo) : 0.0;
    }
    return f;
  };
}

}  // namespace swbo::opt

#endif  // SWBO_OPTIMIZE_HPP
