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

// Independent reference computations for the tests. Nothing here calls into
// the factorized code paths it is used to check.

#ifndef SWBO_TESTS_ORACLES_HPP
#define SWBO_TESTS_ORACLES_HPP

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Matérn 5/2 ARD written out term by term.
inline double matern(const Vec& a, const Vec& b, const Vec& ls, double sf2) {
  double r2 = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double z = (a(i) - b(i)) / ls(i);
    r2 += z * z;
  }
  const double r = std::sqrt(r2);
  return sf2 * (1.0 + std::sqrt(5.0) * r + 5.0 * r2 / 3.0) * std::exp(-std::sqrt(5.0) * r);
}

struct DenseGp {
  Mat x;     // unit-cube inputs, n x d
  Vec y;     // standardized targets
  double mean = 0.0;
  double scale = 1.0;
  Vec ls;
  double sf2 = 1.0;
  double diag = 0.0;  // noise + jitter
  Mat k;
  Mat k_inv;

  DenseGp(const std::vector<Vec>& points, const std::vector<double>& targets, const Vec& lo, const Vec& hi,
          const Vec& lengthscales, double signal, double noise_plus_jitter)
      : ls(lengthscales), sf2(signal), diag(noise_plus_jitter) {
    const auto n = static_cast<Eigen::Index>(points.size());
    const auto d = lo.size();
    x.resize(n, d);
    y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) x(i, j) = (points[i](j) - lo(j)) / (hi(j) - lo(j));
      y(i) = targets[i];
    }
    mean = y.sum() / static_cast<double>(n);
    double ss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) ss += (y(i) - mean) * (y(i) - mean);
    scale = std::sqrt(ss / static_cast<double>(n));
    if (!(scale > 1e-12 * std::max(1.0, std::abs(mean)))) scale = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) y(i) = (y(i) - mean) / scale;
    k.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        k(i, j) = matern(x.row(i).transpose(), x.row(j).transpose(), ls, sf2) + (i == j ? diag : 0.0);
      }
    }
    k_inv = k.fullPivLu().inverse();
  }

  [[nodiscard]] double lml() const {
    const double n = static_cast<double>(y.size());
    const double det = k.fullPivLu().determinant();
    return -0.5 * y.dot(k_inv * y) - 0.5 * std::log(det) - 0.5 * n * std::log(2.0 * std::numbers::pi);
  }

  /// Original-scale mean and latent variance at a unit-cube point.
  [[nodiscard]] std::pair<double, double> predict_unit(const Vec& u) const {
    Vec ks(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) ks(i) = matern(x.row(i).transpose(), u, ls, sf2);
    const double m = ks.dot(k_inv * y);
    const double v = sf2 - ks.dot(k_inv * ks);
    return {mean + scale * m, scale * scale * v};
  }
};

/// Monte Carlo E[max(Y - f*, 0)] for Y ~ N(mu, sigma^2), with its standard error.
inline std::pair<double, double> mc_expected_improvement(double mu, double sigma, double incumbent, int samples,
                                                         std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double v = std::max(mu + sigma * normal(rng) - incumbent, 0.0);
    sum += v;
    sum2 += v * v;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  const double var = std::max(sum2 / n - mean * mean, 0.0);
  return {mean, std::sqrt(var / n)};
}

}  // namespace oracle

#endif  // SWBO_TESTS_ORACLES_HPP
