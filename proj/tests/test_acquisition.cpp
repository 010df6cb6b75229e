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

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "swbo/acquisition.hpp"

namespace swbo {
namespace {

GPModel toy_model(Rng& rng, int d, int n, const Bounds& box) {
  Dataset data;
  for (int i = 0; i < n; ++i) {
    Vector x = uniform_point(rng, box);
    data.add(x, std::cos(2.0 * box.to_unit(x).sum()) + 0.5 * box.to_unit(x)(0));
  }
  Vector ls(d);
  for (int i = 0; i < d; ++i) ls(i) = uniform(rng, 0.1, 0.5);
  return GPModel(data, box, KernelParams{ls, 1.0, 1e-6});
}

TEST(ExpectedImprovement, NoUncertaintyNoImprovement) {
  EXPECT_EQ(expected_improvement(1.5, 0.0, 1.5), 0.0);
  EXPECT_EQ(expected_improvement(2.0, 0.0, 1.5), 0.5);
  EXPECT_EQ(expected_improvement(1.0, 1e-13, 1.5), 0.0);
}

TEST(ExpectedImprovement, AtIncumbentWithUnitSigmaMatchesMonteCarlo) {
  std::mt19937_64 rng(1);
  const auto [mc, se] = oracle::mc_expected_improvement(0.0, 1.0, 0.0, 1000000, rng);
  const double ei = expected_improvement(0.0, 1.0, 0.0);
  EXPECT_NEAR(ei, 0.3989423, 1e-7);
  EXPECT_LE(std::abs(ei - mc), 3.0 * se);
}

TEST(ExpectedImprovement, RandomTriplesMatchMonteCarlo) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> mu_dist(-2.0, 2.0), sigma_dist(0.05, 3.0), z_dist(-3.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    const double mu = mu_dist(rng), sigma = sigma_dist(rng), best = mu + sigma * z_dist(rng);
    const auto [mc, se] = oracle::mc_expected_improvement(mu, sigma, best, 1000000, rng);
    EXPECT_LE(std::abs(expected_improvement(mu, sigma, best) - mc), 3.0 * se)
        << mu << " " << sigma << " " << best;
  }
}

TEST(ExpectedImprovement, VanishesFarBelowIncumbent) {
  EXPECT_LT(expected_improvement(-100.0, 0.01, 0.0), 1e-12);
  EXPECT_GE(expected_improvement(-100.0, 0.01, 0.0), 0.0);
}

TEST(ExpectedImprovement, NonnegativeAndNondecreasingInSigma) {
  for (double gap = -5.0; gap <= 5.0; gap += 0.25) {
    double prev = -1.0;
    for (double sigma = 0.0; sigma <= 5.0; sigma += 0.05) {
      const double ei = expected_improvement(gap, sigma, 0.0);
      EXPECT_GE(ei, 0.0);
      EXPECT_GE(ei, prev - 1e-15) << "gap " << gap << " sigma " << sigma;
      prev = ei;
    }
  }
}

TEST(Gamma, Examples) {
  EXPECT_EQ(gamma({100.0, 0.0}), 1.0);
  EXPECT_EQ(gamma({100.0, 100.0}), 0.0);
  EXPECT_DOUBLE_EQ(gamma({320.0, 80.0}), 0.75);
  EXPECT_EQ(gamma({100.0, 150.0}), 0.0);
  EXPECT_THROW(gamma({0.0, 0.0}), InvalidArgument);
  EXPECT_THROW(gamma({-1.0, 0.0}), InvalidArgument);
}

TEST(CostCooled, Examples) {
  EXPECT_DOUBLE_EQ(cost_cooled(2.0, 4.0, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(cost_cooled(2.0, 4.0, 0.0), 2.0);
  for (double g : {0.0, 0.3, 0.7, 1.0}) EXPECT_DOUBLE_EQ(cost_cooled(0.7, 1.0, g), 0.7);
}

TEST(CostCooled, StrictlyDecreasingInCost) {
  for (double g : {0.1, 0.5, 1.0}) {
    double prev = cost_cooled(1.3, 1.0, g);
    for (double c = 1.5; c <= 64.0; c *= 1.5) {
      const double v = cost_cooled(1.3, c, g);
      EXPECT_LT(v, prev);
      prev = v;
    }
  }
}

TEST(OptimizeAcquisition, PinnedCoordinateIsExact) {
  Rng rng(3);
  const Bounds box = Bounds::uniform(2, 0.0, 5.0);
  const GPModel model = toy_model(rng, 2, 6, box);
  const auto res = optimize_acquisition(AcquisitionQuery(model, {{0, 3.7}}), rng);
  EXPECT_EQ(res.point(0), 3.7);
  EXPECT_TRUE(box.contains(res.point));
}

TEST(OptimizeAcquisition, RandomPinsArePreservedBitExactly) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + static_cast<int>(uniform_index(rng, 3));
    const Bounds box = Bounds::uniform(d, -3.0, 7.0);
    const GPModel model = toy_model(rng, d, 8, box);
    std::map<int, double> pins;
    const int pinned = 1 + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(d - 1)));
    for (int i = 0; i < pinned; ++i) pins[i] = uniform(rng, -3.0, 7.0);
    const auto res = optimize_acquisition(AcquisitionQuery(model, pins), rng, {.raw_samples = 256});
    for (const auto& [idx, v] : pins) EXPECT_EQ(res.point(idx), v);
  }
}

TEST(OptimizeAcquisition, StaysInsideBounds) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + static_cast<int>(uniform_index(rng, 4));
    const Bounds box = Bounds::uniform(d, -10.0 * (trial + 1), 3.0 * (trial + 1));
    const GPModel model = toy_model(rng, d, 3 + static_cast<int>(uniform_index(rng, 8)), box);
    const auto res = optimize_acquisition(AcquisitionQuery(model), rng, {.raw_samples = 256, .restarts = 3});
    EXPECT_TRUE(box.contains(res.point)) << "trial " << trial;
    EXPECT_GE(res.ei, 0.0);
  }
}

TEST(OptimizeAcquisition, BeatsDenseGridIn1d) {
  Rng rng(6);
  const Bounds box = Bounds::uniform(1, 0.0, 1.0);
  Dataset data;
  for (double x : {0.05, 0.3, 0.45, 0.7, 0.95}) data.add(Vector::Constant(1, x), std::sin(9.0 * x));
  const GPModel model(data, box, KernelParams{Vector::Constant(1, 0.15), 1.0, 1e-6});
  const AcquisitionQuery query(model);
  double grid_best = 0.0;
  for (int i = 0; i < 10000; ++i) {
    grid_best = std::max(grid_best, acquisition_value(query, Vector::Constant(1, (i + 0.5) / 10000.0)));
  }
  const auto res = optimize_acquisition(query, rng);
  EXPECT_GE(res.ei, grid_best - 1e-6);
  EXPECT_NEAR(res.ei, acquisition_value(query, res.point), 1e-15);
}

TEST(OptimizeAcquisition, DeterministicForSameSeed) {
  Rng data_rng(7);
  const Bounds box = Bounds::uniform(3, 0.0, 1.0);
  const GPModel model = toy_model(data_rng, 3, 10, box);
  Rng a(42), b(42);
  const auto ra = optimize_acquisition(AcquisitionQuery(model, {{1, 0.25}}), a);
  const auto rb = optimize_acquisition(AcquisitionQuery(model, {{1, 0.25}}), b);
  EXPECT_EQ(ra.point, rb.point);
  EXPECT_EQ(ra.ei, rb.ei);
}

TEST(OptimizeAcquisition, AllDimensionsPinnedIsAnError) {
  Rng rng(8);
  const Bounds box = Bounds::uniform(2, 0.0, 1.0);
  const GPModel model = toy_model(rng, 2, 5, box);
  EXPECT_THROW(optimize_acquisition(AcquisitionQuery(model, {{0, 0.1}, {1, 0.2}}), rng), InvalidArgument);
}

TEST(OptimizeAcquisition, IncumbentDefaultsToBestTarget) {
  Rng rng(9);
  const Bounds box = Bounds::uniform(2, 0.0, 1.0);
  Dataset data;
  for (int i = 0; i < 5; ++i) data.add(uniform_point(rng, box), static_cast<double>(i * i));
  const GPModel model(data, box, KernelParams{Vector::Constant(2, 0.3), 1.0, 1e-6});
  EXPECT_EQ(AcquisitionQuery(model).incumbent, 16.0);
}

TEST(SobolPoints, CoverUnitCube) {
  Rng rng(10);
  const Matrix pts = acq_detail::sobol_points(2, 2048, rng);
  EXPECT_GE(pts.minCoeff(), 0.0);
  EXPECT_LT(pts.maxCoeff(), 1.0);
  // each of the 64 cells of an 8x8 grid holds exactly 32 points for a shifted (t,m,s)-net
  std::vector<int> counts(64, 0);
  for (int j = 0; j < 2048; ++j) {
    counts[static_cast<int>(pts(0, j) * 8) * 8 + static_cast<int>(pts(1, j) * 8)]++;
  }
  for (int c : counts) EXPECT_EQ(c, 32);
}

}  // namespace
}  // namespace swbo
