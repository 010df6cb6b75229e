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

#ifndef SWBO_GP_HPP
#define SWBO_GP_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "swbo/core.hpp"
#include "swbo/kernel.hpp"
#include "swbo/optimize.hpp"

namespace swbo {

/// Observed points and their targets. Points are stored in the problem's
/// original coordinates.
struct Dataset {
  std::vector<Vector> points;
  std::vector<double> targets;

  [[nodiscard]] std::size_t size() const { return points.size(); }
  [[nodiscard]] bool empty() const { return points.empty(); }
  [[nodiscard]] int dim() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }

  void add(Vector x, double y) {
    if (!points.empty() && x.size() != points.front().size()) {
      throw InvalidArgument("Dataset::add: dimension mismatch");
    }
    points.push_back(std::move(x));
    targets.push_back(y);
  }

  [[nodiscard]] double best_target() const {
    if (targets.empty()) throw InsufficientData("Dataset::best_target: empty dataset");
    return *std::max_element(targets.begin(), targets.end());
  }
};

struct FitOptions {
  int restarts = 8;
  double lengthscale_min = 1e-3;  // unit-cube coordinates
  double lengthscale_max = 1e3;
  double signal_min = 1e-4;
  double signal_max = 1e4;
  double noise_min = 1e-8;
  double noise_max = 1e-1;
  double initial_noise = 1e-6;
  // log-uniform start ranges for the restarts
  double init_lengthscale_min = 0.05;
  double init_lengthscale_max = 2.0;
  double init_signal_min = 0.1;
  double init_signal_max = 10.0;
  opt::LbfgsOptions local{.max_iterations = 60, .history = 8, .gradient_tolerance = 1e-5,
                          .function_tolerance = 1e-9, .max_backtracks = 30};
  /// Extra start point tried in addition to the random restarts.
  std::optional<KernelParams> warm_start;
};

namespace gp_detail {

inline constexpr double kJitterStart = 1e-8;
inline constexpr double kJitterMax = 1e-4;
inline constexpr double kDegenerateSignal = 1e-4;

/// Standardized training data in unit-cube coordinates.
struct Transformed {
  Matrix x;  // n x d
  Vector y;
  double mean = 0.0;
  double scale = 1.0;
  bool degenerate = false;
};

inline Transformed transform(const Dataset& data, const Bounds& bounds) {
  if (data.empty()) throw InsufficientData("GP: empty dataset");
  const auto n = static_cast<Eigen::Index>(data.size());
  const int d = bounds.dim();
  if (data.targets.size() != data.points.size()) throw InvalidArgument("GP: points/targets size mismatch");
  Transformed t;
  t.x.resize(n, d);
  t.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector& p = data.points[static_cast<std::size_t>(i)];
    if (p.size() != d) throw InvalidArgument("GP: point dimension does not match bounds");
    t.x.row(i) = bounds.to_unit(p).transpose();
    t.y(i) = data.targets[static_cast<std::size_t>(i)];
  }
  t.mean = t.y.mean();
  const double var = (t.y.array() - t.mean).square().mean();
  const double sd = std::sqrt(var);
  if (!(sd > 1e-12 * std::max(1.0, std::abs(t.mean)))) {
    t.degenerate = true;
    t.scale = 1.0;
  } else {
    t.scale = sd;
  }
  t.y = (t.y.array() - t.mean) / t.scale;
  return t;
}

inline Matrix gram(const Matrix& x, const KernelParams& params) {
  const Eigen::Index n = x.rows();
  Matrix k(n, n);
  const Vector inv_l = params.lengthscales.cwiseInverse();
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = params.signal_variance;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double r2 = (x.row(i) - x.row(j)).transpose().cwiseProduct(inv_l).squaredNorm();
      k(i, j) = k(j, i) = params.signal_variance * matern52_profile(std::sqrt(r2));
    }
  }
  return k;
}

/// Factor K + (noise + jitter) I, escalating the jitter x10 up to 1e-4.
inline std::pair<Eigen::LLT<Matrix>, double> factor(const Matrix& k, double noise) {
  for (double jitter = kJitterStart; jitter <= kJitterMax * 1.0000001; jitter *= 10.0) {
    Matrix a = k;
    a.diagonal().array() += noise + jitter;
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() == Eigen::Success && llt.matrixLLT().diagonal().minCoeff() > 0.0) {
      return {std::move(llt), jitter};
    }
  }
  throw NumericalError("GP: covariance not positive definite after jitter escalation");
}

inline double lml_from_factor(const Eigen::LLT<Matrix>& llt, const Vector& y, Vector* alpha_out) {
  Vector alpha = llt.solve(y);
  const Matrix& l = llt.matrixLLT();
  const double log_det = 2.0 * l.diagonal().array().log().sum();
  const double n = static_cast<double>(y.size());
  if (alpha_out) *alpha_out = alpha;
  return -0.5 * y.dot(alpha) - 0.5 * log_det - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

}  // namespace gp_detail

/// Log marginal likelihood of the standardized targets under `params`, with
/// inputs mapped to the unit cube of `bounds`.
inline double log_marginal_likelihood(const Dataset& data, const Bounds& bounds, const KernelParams& params) {
  params.validate();
  if (params.dim() != bounds.dim()) throw InvalidArgument("log_marginal_likelihood: dimension mismatch");
  const auto t = gp_detail::transform(data, bounds);
  const Matrix k = gp_detail::gram(t.x, params);
  auto [llt, jitter] = gp_detail::factor(k, params.noise_variance);
  return gp_detail::lml_from_factor(llt, t.y, nullptr);
}

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
};

/// Fitted GP posterior. Immutable once built; queries are const and thread-safe.
///
/// Hyperparameters live in the standardized space: unit-cube inputs and
/// zero-mean unit-variance targets. Predictions are reported in the original
/// target scale. The reported variance is that of the latent function.
class GPModel {
 public:
  GPModel(const Dataset& data, Bounds bounds, KernelParams params) : bounds_(std::move(bounds)), params_(std::move(params)) {
    params_.validate();
    if (params_.dim() != bounds_.dim()) throw InvalidArgument("GPModel: kernel/bounds dimension mismatch");
    auto t = gp_detail::transform(data, bounds_);
    x_ = std::move(t.x);
    y_ = std::move(t.y);
    target_mean_ = t.mean;
    target_std_ = t.scale;
    degenerate_ = t.degenerate;
    const Matrix k = gp_detail::gram(x_, params_);
    auto [llt, jitter] = gp_detail::factor(k, params_.noise_variance);
    jitter_ = jitter;
    chol_ = llt.matrixL();
    alpha_ = llt.solve(y_);
    inv_lengthscales_ = params_.lengthscales.cwiseInverse();
    incumbent_ = data.best_target();
  }

  [[nodiscard]] const Bounds& bounds() const { return bounds_; }
  [[nodiscard]] const KernelParams& params() const { return params_; }
  [[nodiscard]] const Matrix& chol() const { return chol_; }
  [[nodiscard]] const Vector& alpha() const { return alpha_; }
  [[nodiscard]] const Matrix& unit_inputs() const { return x_; }
  [[nodiscard]] const Vector& standardized_targets() const { return y_; }
  [[nodiscard]] double target_mean() const { return target_mean_; }
  [[nodiscard]] double target_std() const { return target_std_; }
  [[nodiscard]] double jitter() const { return jitter_; }
  [[nodiscard]] bool degenerate_targets() const { return degenerate_; }
  [[nodiscard]] double incumbent() const { return incumbent_; }
  [[nodiscard]] int dim() const { return bounds_.dim(); }
  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(x_.rows()); }

  /// Standardized mean and unclamped latent variance at a unit-cube point.
  [[nodiscard]] Prediction predict_unit_raw(const Vector& u) const {
    const Eigen::Index n = x_.rows();
    Vector kstar(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double r2 = (x_.row(i).transpose() - u).cwiseProduct(inv_lengthscales_).squaredNorm();
      kstar(i) = params_.signal_variance * matern52_profile(std::sqrt(r2));
    }
    const Vector v = chol_.triangularView<Eigen::Lower>().solve(kstar);
    return {kstar.dot(alpha_), params_.signal_variance - v.squaredNorm()};
  }

  /// Posterior at a point in original coordinates.
  [[nodiscard]] Prediction predict(const Vector& x) const {
    if (x.size() != dim()) throw InvalidArgument("GPModel::predict: dimension mismatch");
    return from_standardized(predict_unit_raw(bounds_.to_unit(x)));
  }

  /// Posterior for many unit-cube points (columns of `u`), original target scale.
  [[nodiscard]] std::vector<Prediction> predict_unit_batch(const Matrix& u) const {
    const Eigen::Index n = x_.rows();
    const Eigen::Index m = u.cols();
    Matrix kstar(n, m);
    for (Eigen::Index j = 0; j < m; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const double r2 = (x_.row(i).transpose() - u.col(j)).cwiseProduct(inv_lengthscales_).squaredNorm();
        kstar(i, j) = params_.signal_variance * matern52_profile(std::sqrt(r2));
      }
    }
    const Vector mean = kstar.transpose() * alpha_;
    chol_.triangularView<Eigen::Lower>().solveInPlace(kstar);
    const Vector explained = kstar.colwise().squaredNorm().transpose();
    std::vector<Prediction> out(static_cast<std::size_t>(m));
    for (Eigen::Index j = 0; j < m; ++j) {
      out[static_cast<std::size_t>(j)] = from_standardized({mean(j), params_.signal_variance - explained(j)});
    }
    return out;
  }

  [[nodiscard]] Prediction from_standardized(Prediction p) const {
    return {target_mean_ + target_std_ * p.mean, target_std_ * target_std_ * std::max(p.variance, 0.0)};
  }

 private:
  Bounds bounds_;
  KernelParams params_;
  Matrix x_;
  Vector y_;
  Matrix chol_;
  Vector alpha_;
  Vector inv_lengthscales_;
  double target_mean_ = 0.0;
  double target_std_ = 1.0;
  double jitter_ = 0.0;
  double incumbent_ = 0.0;
  bool degenerate_ = false;
};

inline Prediction posterior(const GPModel& model, const Vector& x) { return model.predict(x); }

namespace gp_detail {

/// Negative LML and its gradient in log-parameter space
/// theta = [log l_1..log l_d, log sf2, log noise].
class NegLml {
 public:
  NegLml(const Matrix& x, const Vector& y) : y_(y), d_(static_cast<int>(x.cols())) {
    const Eigen::Index n = x.rows();
    sq_diff_.reserve(static_cast<std::size_t>(d_));
    for (int j = 0; j < d_; ++j) {
      Matrix m(n, n);
      for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) {
          const double diff = x(a, j) - x(b, j);
          m(a, b) = diff * diff;
        }
      }
      sq_diff_.push_back(std::move(m));
    }
  }

  double operator()(const Vector& theta, Vector& grad) const {
    const Eigen::Index n = y_.size();
    const double sf2 = std::exp(theta(d_));
    const double noise = std::exp(theta(d_ + 1));
    Vector inv_l2(d_);
    for (int j = 0; j < d_; ++j) inv_l2(j) = std::exp(-2.0 * theta(j));

    Matrix r2 = Matrix::Zero(n, n);
    for (int j = 0; j < d_; ++j) r2 += inv_l2(j) * sq_diff_[static_cast<std::size_t>(j)];
    Matrix k(n, n), g(n, n);
    for (Eigen::Index b = 0; b < n; ++b) {
      for (Eigen::Index a = 0; a < n; ++a) {
        const double s = kSqrt5 * std::sqrt(r2(a, b));
        const double e = std::exp(-s);
        k(a, b) = sf2 * (1.0 + s + s * s / 3.0) * e;
        g(a, b) = (5.0 / 3.0) * sf2 * (1.0 + s) * e;
      }
    }

    std::optional<Eigen::LLT<Matrix>> llt;
    try {
      llt.emplace(factor(k, noise).first);
    } catch (const NumericalError&) {
      grad = Vector::Zero(theta.size());
      return std::numeric_limits<double>::infinity();
    }
    Vector alpha;
    const double lml = lml_from_factor(*llt, y_, &alpha);

    Matrix w = llt->solve(Matrix::Identity(n, n));
    w = alpha * alpha.transpose() - w;

    grad.resize(theta.size());
    const Matrix wg = w.cwiseProduct(g);
    for (int j = 0; j < d_; ++j) {
      grad(j) = -0.5 * inv_l2(j) * wg.cwiseProduct(sq_diff_[static_cast<std::size_t>(j)]).sum();
    }
    grad(d_) = -0.5 * w.cwiseProduct(k).sum();
    grad(d_ + 1) = -0.5 * noise * w.trace();
    return -lml;
  }

 private:
  Vector y_;
  int d_;
  std::vector<Matrix> sq_diff_;
};

inline Vector to_theta(const KernelParams& p) {
  const int d = p.dim();
  Vector theta(d + 2);
  theta.head(d) = p.lengthscales.array().log();
  theta(d) = std::log(p.signal_variance);
  theta(d + 1) = std::log(p.noise_variance);
  return theta;
}

inline KernelParams from_theta(const Vector& theta) {
  const auto d = theta.size() - 2;
  return {theta.head(d).array().exp(), std::exp(theta(d)), std::exp(theta(d + 1))};
}

}  // namespace gp_detail

/// Fit hyperparameters by maximizing the log marginal likelihood with a
/// multi-start bounded quasi-Newton search, then condition on the data.
inline GPModel fit(const Dataset& data, const Bounds& bounds, Rng& rng, const FitOptions& options = {}) {
  if (data.size() < 2) throw InsufficientData("fit: need at least 2 points");
  bool distinct = false;
  for (std::size_t i = 1; i < data.size() && !distinct; ++i) {
    distinct = (data.points[i] - data.points[0]).cwiseAbs().maxCoeff() > 0.0;
  }
  if (!distinct) throw InsufficientData("fit: need at least 2 distinct points");

  const int d = bounds.dim();
  const auto t = gp_detail::transform(data, bounds);
  if (t.degenerate) {
    KernelParams flat{Vector::Ones(d), gp_detail::kDegenerateSignal, options.noise_min};
    return GPModel(data, bounds, flat);
  }

  Vector lo(d + 2), hi(d + 2);
  lo.head(d).setConstant(std::log(options.lengthscale_min));
  hi.head(d).setConstant(std::log(options.lengthscale_max));
  lo(d) = std::log(options.signal_min);
  hi(d) = std::log(options.signal_max);
  lo(d + 1) = std::log(options.noise_min);
  hi(d + 1) = std::log(options.noise_max);

  std::vector<Vector> starts;
  if (options.warm_start && options.warm_start->dim() == d) {
    starts.push_back(gp_detail::to_theta(*options.warm_start).cwiseMax(lo).cwiseMin(hi));
  }
  for (int r = 0; r < options.restarts; ++r) {
    Vector theta(d + 2);
    for (int j = 0; j < d; ++j) {
      theta(j) = uniform(rng, std::log(options.init_lengthscale_min), std::log(options.init_lengthscale_max));
    }
    theta(d) = uniform(rng, std::log(options.init_signal_min), std::log(options.init_signal_max));
    theta(d + 1) = std::log(options.initial_noise);
    starts.push_back(theta);
  }

  const gp_detail::NegLml objective(t.x, t.y);
  Vector best_theta;
  double best_value = std::numeric_limits<double>::infinity();
  for (const auto& start : starts) {
    auto res = opt::minimize_box(objective, start, lo, hi, options.local);
    if (res.value < best_value) {
      best_value = res.value;
      best_theta = res.x;
    }
  }
  if (best_theta.size() == 0) {
    throw NumericalError("fit: no restart produced a finite likelihood");
  }
  return GPModel(data, bounds, gp_detail::from_theta(best_theta));
}

}  // namespace swbo

#endif  // SWBO_GP_HPP
