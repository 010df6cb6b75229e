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

#ifndef SWBO_PROBLEMS_HPP
#define SWBO_PROBLEMS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "swbo/core.hpp"
#include "swbo/gp.hpp"
#include "swbo/optimize.hpp"

namespace swbo {

enum class Function { kAckley, kGriewank, kLevy, kMichalewicz, kRosenbrock, kSalomon, kSchwefel };

inline constexpr std::array<Function, 7> kAllFunctions = {Function::kAckley,     Function::kGriewank,
                                                          Function::kLevy,       Function::kMichalewicz,
                                                          Function::kRosenbrock, Function::kSalomon,
                                                          Function::kSchwefel};

inline std::string_view function_name(Function f) {
  switch (f) {
    case Function::kAckley: return "ackley";
    case Function::kGriewank: return "griewank";
    case Function::kLevy: return "levy";
    case Function::kMichalewicz: return "michalewicz";
    case Function::kRosenbrock: return "rosenbrock";
    case Function::kSalomon: return "salomon";
    case Function::kSchwefel: return "schwefel";
  }
  return "unknown";
}

inline Function parse_function(std::string_view name) {
  for (auto f : kAllFunctions) {
    if (function_name(f) == name) return f;
  }
  throw InvalidArgument("unknown test function '" + std::string(name) + "'");
}

/// Per-dimension domain, identical for every coordinate.
inline std::pair<double, double> function_domain(Function f) {
  switch (f) {
    case Function::kAckley: return {-15.0, 30.0};
    case Function::kGriewank: return {-300.0, 600.0};
    case Function::kLevy: return {-10.0, 10.0};
    case Function::kMichalewicz: return {0.0, std::numbers::pi};
    case Function::kRosenbrock: return {-5.0, 10.0};
    case Function::kSalomon: return {-50.0, 100.0};
    case Function::kSchwefel: return {-500.0, 500.0};
  }
  throw InvalidArgument("function_domain: unknown function");
}

namespace benchmark {

// sin(pi x), exact at integers
inline double sinpi(double x) {
  const double r = x - std::round(x);
  const double s = std::sin(std::numbers::pi * r);
  return (static_cast<long long>(std::round(x)) % 2 == 0) ? s : -s;
}

inline double ackley(const Vector& x) {
  const double d = static_cast<double>(x.size());
  const double rms = std::sqrt(x.squaredNorm() / d);
  const double mean_cos = (2.0 * std::numbers::pi * x.array()).cos().sum() / d;
  return (20.0 - 20.0 * std::exp(-0.2 * rms)) + (std::exp(1.0) - std::exp(mean_cos));
}

inline double griewank(const Vector& x) {
  double sum = 0.0;
  double prod = 1.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    sum += x(i) * x(i) / 4000.0;
    prod *= std::cos(x(i) / std::sqrt(static_cast<double>(i + 1)));
  }
  return sum + (1.0 - prod);
}

inline double levy(const Vector& x) {
  const Eigen::Index d = x.size();
  auto w = [&](Eigen::Index i) { return 1.0 + (x(i) - 1.0) / 4.0; };
  const double s0 = sinpi(w(0));
  double value = s0 * s0;
  for (Eigen::Index i = 0; i + 1 < d; ++i) {
    const double wi = w(i);
    const double s = std::sin(std::numbers::pi * wi + 1.0);
    value += (wi - 1.0) * (wi - 1.0) * (1.0 + 10.0 * s * s);
  }
  const double wd = w(d - 1);
  const double sd = sinpi(2.0 * wd);
  value += (wd - 1.0) * (wd - 1.0) * (1.0 + sd * sd);
  return value;
}

inline double michalewicz(const Vector& x) {
  constexpr int m = 10;
  double value = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double s = std::sin(static_cast<double>(i + 1) * x(i) * x(i) / std::numbers::pi);
    value -= std::sin(x(i)) * std::pow(s, 2 * m);
  }
  return value;
}

inline double rosenbrock(const Vector& x) {
  double value = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double a = x(i + 1) - x(i) * x(i);
    const double b = x(i) - 1.0;
    value += 100.0 * a * a + b * b;
  }
  return value;
}

inline double salomon(const Vector& x) {
  const double r = x.norm();
  return (1.0 - std::cos(2.0 * std::numbers::pi * r)) + 0.1 * r;
}

inline double schwefel(const Vector& x) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) sum += x(i) * std::sin(std::sqrt(std::abs(x(i))));
  return 418.9829 * static_cast<double>(x.size()) - sum;
}

/// Canonical minimization form.
inline double minimization_value(Function f, const Vector& x) {
  switch (f) {
    case Function::kAckley: return ackley(x);
    case Function::kGriewank: return griewank(x);
    case Function::kLevy: return levy(x);
    case Function::kMichalewicz: return michalewicz(x);
    case Function::kRosenbrock: return rosenbrock(x);
    case Function::kSalomon: return salomon(x);
    case Function::kSchwefel: return schwefel(x);
  }
  throw InvalidArgument("minimization_value: unknown function");
}

/// Known minimizer where one is available in closed form.
inline std::optional<Vector> known_optimizer(Function f, int d) {
  switch (f) {
    case Function::kAckley:
    case Function::kGriewank:
    case Function::kSalomon: return Vector::Zero(d);
    case Function::kLevy:
    case Function::kRosenbrock: return Vector::Ones(d);
    case Function::kSchwefel: return Vector::Constant(d, 420.968746);
    case Function::kMichalewicz: return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace benchmark

/// Maximum objective values keyed by (function, dimension).
class YStarTable {
 public:
  using Key = std::pair<Function, int>;

  /// Values produced by the oracle and checked in under data/y_star.txt.
  static YStarTable builtin() {
    YStarTable t;
    for (auto f : kAllFunctions) {
      for (int d = 2; d <= 4; ++d) t.set(f, d, 0.0);
    }
    t.set(Function::kMichalewicz, 2, 1.8013034100985537);
    t.set(Function::kMichalewicz, 3, 2.7603946799945605);
    t.set(Function::kMichalewicz, 4, 3.698857098466644);
    t.set(Function::kSchwefel, 2, -2.5455132345086895e-05);
    t.set(Function::kSchwefel, 3, -3.8182698517630342e-05);
    t.set(Function::kSchwefel, 4, -5.091026469017379e-05);
    return t;
  }

  void set(Function f, int d, double value) { values_[{f, d}] = value; }

  [[nodiscard]] double at(Function f, int d) const {
    auto it = values_.find({f, d});
    if (it == values_.end()) {
      throw InvalidArgument("no y_star for " + std::string(function_name(f)) + "," + std::to_string(d));
    }
    return it->second;
  }

  [[nodiscard]] const std::map<Key, double>& values() const { return values_; }

  /// Lines of `function,dimension = value`; `#` starts a comment.
  static YStarTable parse(std::istream& in) {
    YStarTable t;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      const auto eq = line.find('=');
      const auto comma = line.find(',');
      if (eq == std::string::npos || comma == std::string::npos || comma > eq) {
        throw InvalidArgument("y_star file line " + std::to_string(lineno) + ": expected 'function,d = value'");
      }
      auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      };
      const Function f = parse_function(trim(line.substr(0, comma)));
      const int d = std::stoi(trim(line.substr(comma + 1, eq - comma - 1)));
      const double v = std::stod(trim(line.substr(eq + 1)));
      t.set(f, d, v);
    }
    return t;
  }

  static YStarTable load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open y_star file '" + path + "'");
    return parse(in);
  }

  void write(std::ostream& out) const {
    out << "# maximum objective value per (function, dimension); regenerate with `swbo oracle`\n";
    char buf[64];
    for (const auto& [key, value] : values_) {
      std::snprintf(buf, sizeof(buf), "%.17g", value);
      out << function_name(key.first) << "," << key.second << " = " << buf << "\n";
    }
  }

 private:
  std::map<Key, double> values_;
};

/// A test function instance: dimension, box, costly coordinates and optimum.
/// evaluate() returns the negated canonical value so every caller maximizes.
struct Problem {
  Function function = Function::kAckley;
  int d = 2;
  Bounds bounds;
  std::vector<int> costly_indices;  // sorted
  std::vector<int> cheap_indices;   // sorted complement
  double y_star = 0.0;
  std::optional<Vector> x_star;

  [[nodiscard]] std::string name() const { return std::string(function_name(function)); }

  [[nodiscard]] double evaluate(const Vector& x) const {
    if (x.size() != d) throw InvalidArgument("evaluate: point has wrong dimension");
    if (!bounds.contains(x)) throw InvalidArgument("evaluate: point outside the domain of " + name());
    return -benchmark::minimization_value(function, x);
  }

  [[nodiscard]] Vector costly_part(const Vector& x) const { return gather(x, costly_indices); }
  [[nodiscard]] Vector cheap_part(const Vector& x) const { return gather(x, cheap_indices); }
  [[nodiscard]] Bounds costly_bounds() const { return bounds.subset(costly_indices); }
  [[nodiscard]] Bounds cheap_bounds() const { return bounds.subset(cheap_indices); }
};

inline Problem make_problem(Function f, int d, std::vector<int> costly, const YStarTable& table = YStarTable::builtin()) {
  if (d < 2 || d > 4) throw InvalidArgument("make_problem: d must be 2, 3 or 4");
  std::sort(costly.begin(), costly.end());
  if (std::adjacent_find(costly.begin(), costly.end()) != costly.end()) {
    throw InvalidArgument("make_problem: duplicate costly index");
  }
  if (costly.empty() || static_cast<int>(costly.size()) >= d) {
    throw InvalidArgument("make_problem: need 1 <= costly count <= d-1");
  }
  if (costly.front() < 0 || costly.back() >= d) throw InvalidArgument("make_problem: costly index out of range");
  Problem p;
  p.function = f;
  p.d = d;
  const auto [lo, hi] = function_domain(f);
  p.bounds = Bounds::uniform(d, lo, hi);
  p.costly_indices = std::move(costly);
  for (int i = 0; i < d; ++i) {
    if (!std::binary_search(p.costly_indices.begin(), p.costly_indices.end(), i)) p.cheap_indices.push_back(i);
  }
  p.y_star = table.at(f, d);
  p.x_star = benchmark::known_optimizer(f, d);
  return p;
}

/// Draw `costly_count` costly dimensions uniformly without replacement.
inline Problem make_configuration(std::string_view name, int d, int costly_count, Rng& rng,
                                  const YStarTable& table = YStarTable::builtin()) {
  const Function f = parse_function(name);
  if (d < 2 || d > 4) throw InvalidArgument("make_configuration: d must be 2, 3 or 4");
  if (costly_count < 1 || costly_count > d - 1) {
    throw InvalidArgument("make_configuration: costly_count must be in [1, d-1]");
  }
  std::vector<int> dims(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) dims[static_cast<std::size_t>(i)] = i;
  for (int i = 0; i < costly_count; ++i) {
    const auto j = static_cast<std::size_t>(i) + uniform_index(rng, static_cast<std::uint64_t>(d - i));
    std::swap(dims[static_cast<std::size_t>(i)], dims[j]);
  }
  dims.resize(static_cast<std::size_t>(costly_count));
  return make_problem(f, d, std::move(dims), table);
}

enum class DesignKind { kShared, kNested };

inline constexpr std::size_t kMaxNestedDesign = 10000;

inline int default_design_size(int d) { return 3 * d; }

/// Uniform random design of 3*d points, evaluated.
inline Dataset shared_design(const Problem& problem, Rng& rng) {
  Dataset data;
  for (int i = 0; i < default_design_size(problem.d); ++i) {
    Vector x = uniform_point(rng, problem.bounds);
    const double y = problem.evaluate(x);
    data.add(std::move(x), y);
  }
  return data;
}

/// n distinct costly setups, each used for k distinct cheap draws; point t
/// uses setup ceil(t/k).
inline Dataset nested_design(const Problem& problem, int n, int k, Rng& rng) {
  if (n < 2 || k < 1) throw InvalidArgument("nested_design: need n >= 2 and k >= 1");
  if (static_cast<std::size_t>(n) * static_cast<std::size_t>(k) > kMaxNestedDesign) {
    throw InvalidArgument("nested_design: n*k exceeds the design cap");
  }
  const Bounds costly_box = problem.costly_bounds();
  const Bounds cheap_box = problem.cheap_bounds();
  auto draw_unique = [&](const Bounds& box, std::vector<Vector>& seen) {
    for (;;) {
      Vector v = uniform_point(rng, box);
      const bool dup = std::any_of(seen.begin(), seen.end(), [&](const Vector& s) { return s == v; });
      if (!dup) {
        seen.push_back(v);
        return v;
      }
    }
  };
  std::vector<Vector> setups, cheaps;
  for (int i = 0; i < n; ++i) draw_unique(costly_box, setups);
  Dataset data;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) {
      const Vector cheap = draw_unique(cheap_box, cheaps);
      Vector x(problem.d);
      for (std::size_t c = 0; c < problem.costly_indices.size(); ++c) {
        x(problem.costly_indices[c]) = setups[static_cast<std::size_t>(i)](static_cast<Eigen::Index>(c));
      }
      for (std::size_t c = 0; c < problem.cheap_indices.size(); ++c) {
        x(problem.cheap_indices[c]) = cheap(static_cast<Eigen::Index>(c));
      }
      const double y = problem.evaluate(x);
      data.add(std::move(x), y);
    }
  }
  return data;
}

inline Dataset initial_design(const Problem& problem, DesignKind kind, int n_costly, int per_setup, Rng& rng) {
  return kind == DesignKind::kNested ? nested_design(problem, n_costly, per_setup, rng) : shared_design(problem, rng);
}

/// Brute-force maximum: a dense grid of about `grid_points` points, then
/// bounded refinement of the best grid cells. Also considers the known
/// optimizer when one exists.
inline double oracle_y_star(Function f, int d, std::size_t grid_points = 1000000, int refine_top = 32) {
  const auto [lo, hi] = function_domain(f);
  const int per_dim = std::max(2, static_cast<int>(std::floor(std::pow(static_cast<double>(grid_points), 1.0 / d) + 1e-9)));
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(per_dim);

  auto value = [f](const Vector& x) { return -benchmark::minimization_value(f, x); };

  std::vector<std::pair<double, Vector>> top;
  Vector x(d);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    for (int i = 0; i < d; ++i) {
      const auto c = rest % static_cast<std::size_t>(per_dim);
      rest /= static_cast<std::size_t>(per_dim);
      x(i) = lo + (hi - lo) * static_cast<double>(c) / static_cast<double>(per_dim - 1);
    }
    const double v = value(x);
    if (static_cast<int>(top.size()) < refine_top || v > top.back().first) {
      top.emplace_back(v, x);
      std::sort(top.begin(), top.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
      if (static_cast<int>(top.size()) > refine_top) top.pop_back();
    }
  }

  const Vector lower = Vector::Constant(d, lo);
  const Vector upper = Vector::Constant(d, hi);
  double best = top.front().first;
  opt::LbfgsOptions local;
  local.max_iterations = 500;
  local.gradient_tolerance = 1e-12;
  local.function_tolerance = 1e-16;
  for (const auto& [v, start] : top) {
    auto neg = [&value](const Vector& p) { return -value(p); };
    auto objective = opt::with_central_differences(neg, lower, upper, 1e-7 * (hi - lo));
    Vector p = opt::minimize_box(objective, start, lower, upper, local).x;
    // coordinate-wise Brent polish within one grid cell
    const double cell = (hi - lo) / static_cast<double>(per_dim - 1);
    for (int sweep = 0; sweep < 4; ++sweep) {
      for (int i = 0; i < d; ++i) {
        auto along = [&](double t) {
          Vector q = p;
          q(i) = t;
          return -value(q);
        };
        const auto [t, v] = boost::math::tools::brent_find_minima(along, std::max(lo, p(i) - cell),
                                                                  std::min(hi, p(i) + cell), 52);
        if (-v >= value(p)) p(i) = t;
      }
    }
    best = std::max(best, value(p));
  }
  if (auto xs = benchmark::known_optimizer(f, d)) best = std::max(best, value(*xs));
  return best + 0.0;
}

}  // namespace swbo

#endif  // SWBO_PROBLEMS_HPP
