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

#ifndef SWBO_CORE_HPP
#define SWBO_CORE_HPP

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace swbo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Covariance stayed indefinite after jitter escalation.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InsufficientData : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Axis-aligned box. lower(i) < upper(i) for every dimension.
struct Bounds {
  Vector lower;
  Vector upper;

  Bounds() = default;
  Bounds(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.size() != upper.size()) {
      throw InvalidArgument("Bounds: lower/upper size mismatch");
    }
    for (Eigen::Index i = 0; i < lower.size(); ++i) {
      if (!(lower(i) < upper(i))) {
        throw InvalidArgument("Bounds: empty interval in dimension " + std::to_string(i));
      }
    }
  }

  static Bounds uniform(int d, double lo, double hi) {
    return Bounds(Vector::Constant(d, lo), Vector::Constant(d, hi));
  }

  [[nodiscard]] int dim() const { return static_cast<int>(lower.size()); }
  [[nodiscard]] Vector width() const { return upper - lower; }

  [[nodiscard]] bool contains(const Vector& x) const {
    if (x.size() != lower.size()) return false;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (!(x(i) >= lower(i) && x(i) <= upper(i))) return false;
    }
    return true;
  }

  [[nodiscard]] Vector clip(const Vector& x) const { return x.cwiseMax(lower).cwiseMin(upper); }

  [[nodiscard]] Vector to_unit(const Vector& x) const {
    return (x - lower).cwiseQuotient(width());
  }

  [[nodiscard]] Vector from_unit(const Vector& u) const {
    return lower + u.cwiseProduct(width());
  }

  [[nodiscard]] Bounds subset(const std::vector<int>& idx) const {
    Vector lo(idx.size()), hi(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      lo(static_cast<Eigen::Index>(i)) = lower(idx[i]);
      hi(static_cast<Eigen::Index>(i)) = upper(idx[i]);
    }
    return Bounds(lo, hi);
  }
};

/// Uniform double in [0, 1) from the top 53 bits; stable across standard libraries.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

inline Vector uniform_point(Rng& rng, const Bounds& bounds) {
  Vector x(bounds.dim());
  for (int i = 0; i < bounds.dim(); ++i) x(i) = uniform(rng, bounds.lower(i), bounds.upper(i));
  return x;
}

/// Unbiased integer in [0, n) by rejection.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = Rng::max() - (Rng::max() % n);
  std::uint64_t v = rng();
  while (v >= limit) v = rng();
  return v % n;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline Vector gather(const Vector& x, const std::vector<int>& idx) {
  Vector out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Eigen::Index>(i)) = x(idx[i]);
  return out;
}

}  // namespace swbo

#endif  // SWBO_CORE_HPP
