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

#ifndef SWBO_KERNEL_HPP
#define SWBO_KERNEL_HPP

#include <cmath>

#include "swbo/core.hpp"

namespace swbo {

/// Matérn 5/2 hyperparameters with one lengthscale per input dimension (ARD).
struct KernelParams {
  Vector lengthscales;
  double signal_variance = 1.0;
  double noise_variance = 1e-6;

  [[nodiscard]] int dim() const { return static_cast<int>(lengthscales.size()); }

  void validate() const {
    if (lengthscales.size() == 0) throw InvalidArgument("KernelParams: no lengthscales");
    if ((lengthscales.array() <= 0.0).any() || !lengthscales.allFinite()) {
      throw InvalidArgument("KernelParams: lengthscales must be strictly positive");
    }
    if (!(signal_variance > 0.0) || !std::isfinite(signal_variance)) {
      throw InvalidArgument("KernelParams: signal_variance must be strictly positive");
    }
    if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance)) {
      throw InvalidArgument("KernelParams: noise_variance must be nonnegative");
    }
  }
};

inline constexpr double kSqrt5 = 2.2360679774997896964091736687313;

/// Matérn 5/2 profile as a function of the scaled distance r.
inline double matern52_profile(double r) {
  const double s = kSqrt5 * r;
  return (1.0 + s + s * s / 3.0) * std::exp(-s);
}

/// k(a, b) = sf2 (1 + sqrt5 r + 5 r^2 / 3) exp(-sqrt5 r), r^2 = sum_i (a_i - b_i)^2 / l_i^2.
inline double matern52_ard(const Vector& a, const Vector& b, const KernelParams& params) {
  if (a.size() != b.size() || a.size() != params.lengthscales.size()) {
    throw InvalidArgument("matern52_ard: dimension mismatch");
  }
  const double r2 = (a - b).cwiseQuotient(params.lengthscales).squaredNorm();
  return params.signal_variance * matern52_profile(std::sqrt(r2));
}

}  // namespace swbo

#endif  // SWBO_KERNEL_HPP
