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

#ifndef SWBO_HARNESS_SUMMARIZE_HPP
#define SWBO_HARNESS_SUMMARIZE_HPP

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "swbo/harness/experiment.hpp"
#include "swbo/metrics.hpp"

namespace swbo::harness {

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Comma-separated table with a header row. Fields never contain commas.
class CsvTable {
 public:
  static CsvTable parse(std::istream& in, const std::string& source) {
    CsvTable t;
    t.source_ = source;
    std::string line;
    if (!std::getline(in, line)) throw SchemaError(source + ": empty file");
    t.header_ = split(line);
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      auto fields = split(line);
      if (fields.size() != t.header_.size()) {
        throw SchemaError(source + ": row " + std::to_string(t.rows_.size() + 1) + " has " +
                          std::to_string(fields.size()) + " fields, header has " + std::to_string(t.header_.size()));
      }
      t.rows_.push_back(std::move(fields));
    }
    return t;
  }

  static CsvTable load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open '" + path.string() + "'");
    return parse(in, path.string());
  }

  /// Index of a required column; the error names the column.
  [[nodiscard]] std::size_t column(const std::string& name) const {
    const auto it = std::find(header_.begin(), header_.end(), name);
    if (it == header_.end()) throw SchemaError(source_ + ": missing column '" + name + "'");
    return static_cast<std::size_t>(it - header_.begin());
  }

  [[nodiscard]] const std::vector<std::string>& header() const { return header_; }
  [[nodiscard]] const std::vector<std::vector<std::string>>& rows() const { return rows_; }

 private:
  static std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
  }

  std::string source_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct SummaryRecord {
  std::string run_id;
  std::string policy;  // label, e.g. preuse(p=0.5)
  std::string problem;
  int d = 0;
  double switch_cost = 0.0;
  std::string policy_params;
  double gap = 0.0;

  /// Family name: the label up to its parameter list.
  [[nodiscard]] std::string family() const { return policy.substr(0, policy.find('(')); }
};

inline std::vector<SummaryRecord> read_summary(const CsvTable& table) {
  const std::size_t c_run = table.column("run_id"), c_pol = table.column("policy"), c_prob = table.column("problem"),
                    c_d = table.column("d"), c_cost = table.column("switch_cost"),
                    c_params = table.column("policy_params"), c_gap = table.column("gap");
  std::vector<SummaryRecord> out;
  for (const auto& row : table.rows()) {
    SummaryRecord r;
    r.run_id = row[c_run];
    r.policy = row[c_pol];
    r.problem = row[c_prob];
    try {
      r.d = std::stoi(row[c_d]);
      r.switch_cost = std::stod(row[c_cost]);
      r.gap = std::stod(row[c_gap]);
    } catch (const std::exception&) {
      throw SchemaError("summary row " + r.run_id + ": non-numeric d, switch_cost or gap");
    }
    r.policy_params = row[c_params];
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<SummaryRecord> load_summary(const std::filesystem::path& dir) {
  return read_summary(CsvTable::load(dir / "summary.csv"));
}

enum class Mark { kNone, kBest, kSecond };

inline const char* mark_name(Mark m) {
  switch (m) {
    case Mark::kBest: return "best";
    case Mark::kSecond: return "second";
    case Mark::kNone: break;
  }
  return "";
}

struct Table2Entry {
  double switch_cost = 0.0;
  std::string problem;
  int d = 0;
  std::string policy;  // family
  std::string policy_params;
  double mean_gap = 0.0;
  double ci_halfwidth = 0.0;
  std::size_t runs = 0;
  Mark mark = Mark::kNone;
};

/// Per (switch cost, problem, d): the best configuration of each policy
/// family by mean final gap, ranked. Families tied on the best mean are all
/// marked best; the next distinct mean is marked second. Rows within a group
/// are ordered by mean gap, descending, then family name.
inline std::vector<Table2Entry> table2(const std::vector<SummaryRecord>& records) {
  using GroupKey = std::tuple<double, std::string, int>;
  std::map<GroupKey, std::map<std::string, std::map<std::string, std::vector<double>>>> groups;
  for (const auto& r : records) groups[{r.switch_cost, r.problem, r.d}][r.family()][r.policy_params].push_back(r.gap);

  std::vector<Table2Entry> out;
  for (const auto& [key, families] : groups) {
    std::vector<Table2Entry> rows;
    for (const auto& [family, configs] : families) {
      Table2Entry best;
      bool have = false;
      for (const auto& [params, gaps] : configs) {  // params in lexicographic order; first wins ties
        const Aggregate a = aggregate(std::span<const double>(gaps));
        if (!have || a.mean > best.mean_gap) {
          best = {std::get<0>(key), std::get<1>(key), std::get<2>(key), family, params, a.mean, a.ci_halfwidth,
                  gaps.size(), Mark::kNone};
          have = true;
        }
      }
      rows.push_back(best);
    }
    std::sort(rows.begin(), rows.end(), [](const Table2Entry& a, const Table2Entry& b) {
      if (a.mean_gap != b.mean_gap) return a.mean_gap > b.mean_gap;
      return a.policy < b.policy;
    });
    const double top = rows.front().mean_gap;
    std::optional<double> second;
    for (auto& r : rows) {
      if (r.mean_gap == top) {
        r.mark = Mark::kBest;
      } else if (!second || r.mean_gap == *second) {
        second = r.mean_gap;
        r.mark = Mark::kSecond;
      }
    }
    out.insert(out.end(), rows.begin(), rows.end());
  }
  return out;
}

inline void write_table2(std::ostream& out, const std::vector<Table2Entry>& rows) {
  out << "switch_cost,problem,d,policy,policy_params,mean_gap,ci_halfwidth,runs,mark\n";
  for (const auto& r : rows) {
    out << format_double(r.switch_cost) << "," << r.problem << "," << r.d << "," << r.policy << "," << r.policy_params
        << "," << format_double(r.mean_gap) << "," << format_double(r.ci_halfwidth) << "," << r.runs << ","
        << mark_name(r.mark) << "\n";
  }
}

struct PsweepPoint {
  double p = 0.0;
  double switch_cost = 0.0;
  double mean_gap = 0.0;
  double ci_halfwidth = 0.0;
};

struct BestP {
  double switch_cost = 0.0;
  double median_best_p = 0.0;
  std::size_t problems = 0;
};

struct PsweepResult {
  std::vector<PsweepPoint> curve;  // pooled over problems
  std::vector<BestP> best_p;       // median over problems of the per-problem argmax p
};

inline double parse_p(const std::string& params) {
  if (params.rfind("p=", 0) != 0) throw SchemaError("preuse policy_params '" + params + "' is not of the form p=<value>");
  return std::stod(params.substr(2));
}

/// pReuse records only. The per-problem best p is the argmax of mean gap;
/// ties go to the smaller p.
inline PsweepResult psweep(const std::vector<SummaryRecord>& records) {
  std::map<std::pair<double, double>, std::vector<double>> pooled;  // (cost, p)
  std::map<std::tuple<double, std::string, int>, std::map<double, std::vector<double>>> per_problem;
  for (const auto& r : records) {
    if (r.family() != "preuse") continue;
    const double p = parse_p(r.policy_params);
    pooled[{r.switch_cost, p}].push_back(r.gap);
    per_problem[{r.switch_cost, r.problem, r.d}][p].push_back(r.gap);
  }
  if (pooled.empty()) throw SchemaError("psweep: summary holds no preuse runs");

  PsweepResult res;
  for (const auto& [key, gaps] : pooled) {
    const Aggregate a = aggregate(std::span<const double>(gaps));
    res.curve.push_back({key.second, key.first, a.mean, a.ci_halfwidth});
  }
  std::sort(res.curve.begin(), res.curve.end(), [](const PsweepPoint& a, const PsweepPoint& b) {
    return std::tie(a.switch_cost, a.p) < std::tie(b.switch_cost, b.p);
  });

  std::map<double, std::vector<double>> best_by_cost;
  for (const auto& [key, by_p] : per_problem) {
    double best_p = 0.0, best_mean = -1.0;
    for (const auto& [p, gaps] : by_p) {
      const double m = aggregate(std::span<const double>(gaps)).mean;
      if (m > best_mean) {
        best_mean = m;
        best_p = p;
      }
    }
    best_by_cost[std::get<0>(key)].push_back(best_p);
  }
  for (const auto& [cost, ps] : best_by_cost) {
    res.best_p.push_back({cost, aggregate(std::span<const double>(ps)).median, ps.size()});
  }
  return res;
}

inline void write_psweep_curve(std::ostream& out, const PsweepResult& res) {
  out << "p,switch_cost,mean_gap,ci_halfwidth\n";
  for (const auto& c : res.curve) {
    out << format_double(c.p) << "," << format_double(c.switch_cost) << "," << format_double(c.mean_gap) << ","
        << format_double(c.ci_halfwidth) << "\n";
  }
}

inline void write_best_p(std::ostream& out, const PsweepResult& res) {
  out << "switch_cost,median_best_p,problems\n";
  for (const auto& b : res.best_p) {
    out << format_double(b.switch_cost) << "," << format_double(b.median_best_p) << "," << b.problems << "\n";
  }
}

}  // namespace swbo::harness

#endif  // SWBO_HARNESS_SUMMARIZE_HPP
