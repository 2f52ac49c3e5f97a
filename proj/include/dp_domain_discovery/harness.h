//
// Copyright 2026 The DP Domain Discovery Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Experiment sweeps: a grid over contribution bounds and output sizes,
// repeated trials with derived seeds, metric evaluation, aggregation and
// CSV/JSON emission.

#ifndef DP_DOMAIN_DISCOVERY_HARNESS_H_
#define DP_DOMAIN_DISCOVERY_HARNESS_H_

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <type_traits>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "dp_domain_discovery/calibration.h"
#include "dp_domain_discovery/dataset.h"
#include "dp_domain_discovery/mechanisms.h"
#include "dp_domain_discovery/metrics.h"
#include "dp_domain_discovery/random.h"
#include "dp_domain_discovery/status_macros.h"
#include "nlohmann/json.hpp"

namespace dp_domain_discovery {

struct DataSource {
  enum class Kind { kCsv, kZipf, kSingleton, kFlat };
  Kind kind = Kind::kZipf;
  // kCsv
  std::string path;
  bool has_header = false;
  // kZipf
  ZipfParams zipf;
  int64_t n_items = 0;
  int64_t n_users = 0;
  uint64_t data_seed = 0;
  // kSingleton: n; kFlat: k blocks of b users.
  int64_t n = 0;
  int64_t k = 0;
  int64_t b = 0;
};

// A metric column of a sweep. Besides the MetricName family, sweeps accept
// two per-instance references for hitting set: "Opt" (exhaustive optimum)
// and "GreedyHits" (non-private greedy over the whole union).
struct MetricSpec {
  std::string name;
  double p = 1.0;  // MM_p only

  std::string Label() const {
    if (name != "MM_p") return name;
    if (std::isinf(p)) return "MM_p(p=inf)";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "MM_p(p=%g)", p);
    return buf;
  }
};

struct SweepSpec {
  Task task = Task::kSetUnion;
  std::string dataset_id = "dataset";
  PrivacyBudget budget;
  std::vector<int64_t> delta0_grid;
  std::vector<int64_t> k_grid;
  int64_t trials = 5;
  uint64_t seed = 0;
  DataSource data;
  std::vector<MetricSpec> metrics;
  NoiseMode noise = NoiseMode::kCalibrated;

  absl::Status Validate() const;
};

struct ResultRow {
  std::string task;
  std::string dataset_id;
  double eps = 0;
  double delta = 0;
  int64_t delta0 = 0;
  int64_t k = 0;
  int64_t trial = 0;
  uint64_t seed = 0;
  std::string metric_name;
  double value = 0;
  double wall_time_ms = 0;
  // Calibration audit columns. lambda is 0 for set union.
  double sigma = 0;
  double threshold = 0;
  double lambda = 0;
};

struct SummaryRow {
  std::string task;
  std::string dataset_id;
  double eps = 0;
  double delta = 0;
  int64_t delta0 = 0;
  int64_t k = 0;
  std::string metric_name;
  int64_t trials = 0;
  double mean = 0;
  double std_error = 0;
};

enum class OutputFormat { kCsv, kJson };

namespace internal {

inline bool MetricAllowed(Task task, const std::string& name) {
  if (name == "MM" || name == "MM_p" || name == "Hits" ||
      name == "MissedUsers") {
    return true;
  }
  if (name == "MM_topk" || name == "L1_topk") return task != Task::kSetUnion;
  if (name == "Opt" || name == "GreedyHits") return task == Task::kHittingSet;
  return false;
}

}  // namespace internal

inline absl::Status SweepSpec::Validate() const {
  DPDD_RETURN_IF_ERROR(budget.Validate());
  if (trials < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("trials must be >= 1, got ", trials));
  }
  if (delta0_grid.empty()) {
    return absl::InvalidArgumentError("delta0_grid must not be empty");
  }
  for (int64_t d0 : delta0_grid) {
    if (d0 < 1) return absl::InvalidArgumentError("delta0 values must be >= 1");
  }
  if (task != Task::kSetUnion) {
    if (k_grid.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("k_grid must not be empty for ", TaskToString(task)));
    }
    for (int64_t k : k_grid) {
      if (k < 1) return absl::InvalidArgumentError("k values must be >= 1");
    }
  }
  if (metrics.empty()) {
    return absl::InvalidArgumentError("metrics must not be empty");
  }
  for (const MetricSpec& m : metrics) {
    if (!internal::MetricAllowed(task, m.name)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "metric '", m.name, "' is unknown or not defined for task ",
          TaskToString(task)));
    }
    if (m.name == "MM_p" && (std::isnan(m.p) || m.p < 0)) {
      return absl::InvalidArgumentError("MM_p needs p in [0, inf]");
    }
  }
  return absl::OkStatus();
}

inline absl::StatusOr<Task> ParseTask(const std::string& s) {
  if (s == "set_union" || s == "set-union") return Task::kSetUnion;
  if (s == "top_k" || s == "top-k") return Task::kTopK;
  if (s == "hitting_set" || s == "hitting-set") return Task::kHittingSet;
  return absl::InvalidArgumentError(absl::StrCat("unknown task '", s, "'"));
}

inline absl::StatusOr<NoiseMode> ParseNoiseMode(const std::string& s) {
  if (s == "calibrated") return NoiseMode::kCalibrated;
  if (s == "disabled") return NoiseMode::kDisabled;
  return absl::InvalidArgumentError(
      absl::StrCat("noise must be 'calibrated' or 'disabled', got '", s, "'"));
}

namespace internal {

inline absl::Status CheckKeys(const nlohmann::json& obj,
                              std::initializer_list<const char*> allowed,
                              const char* where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
          return key == a;
        }) == allowed.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown key '", key, "' in ", where));
    }
  }
  return absl::OkStatus();
}

inline absl::StatusOr<DataSource> ParseDataSource(const nlohmann::json& j) {
  DataSource src;
  if (!j.is_object()) {
    return absl::InvalidArgumentError("'data' must be an object");
  }
  if (j.contains("csv")) {
    DPDD_RETURN_IF_ERROR(CheckKeys(j, {"csv", "has_header"}, "data"));
    src.kind = DataSource::Kind::kCsv;
    src.path = j.at("csv").get<std::string>();
    src.has_header = j.value("has_header", false);
  } else if (j.contains("zipf")) {
    DPDD_RETURN_IF_ERROR(CheckKeys(j, {"zipf"}, "data"));
    const auto& z = j.at("zipf");
    DPDD_RETURN_IF_ERROR(
        CheckKeys(z, {"C", "s", "items", "users", "seed"}, "data.zipf"));
    src.kind = DataSource::Kind::kZipf;
    src.zipf.c = z.at("C").get<double>();
    src.zipf.s = z.at("s").get<double>();
    src.n_items = z.at("items").get<int64_t>();
    src.n_users = z.at("users").get<int64_t>();
    src.data_seed = z.value("seed", uint64_t{0});
  } else if (j.contains("hard_instance")) {
    const auto kind = j.at("hard_instance").get<std::string>();
    if (kind == "singleton") {
      DPDD_RETURN_IF_ERROR(CheckKeys(j, {"hard_instance", "n"}, "data"));
      src.kind = DataSource::Kind::kSingleton;
      src.n = j.at("n").get<int64_t>();
      if (src.n < 1) return absl::InvalidArgumentError("n must be >= 1");
    } else if (kind == "flat") {
      DPDD_RETURN_IF_ERROR(CheckKeys(j, {"hard_instance", "k", "b"}, "data"));
      src.kind = DataSource::Kind::kFlat;
      src.k = j.at("k").get<int64_t>();
      src.b = j.at("b").get<int64_t>();
      if (src.k < 1 || src.b < 1) {
        return absl::InvalidArgumentError("k and b must be >= 1");
      }
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown hard_instance '", kind, "'"));
    }
  } else {
    return absl::InvalidArgumentError(
        "'data' needs one of 'csv', 'zipf' or 'hard_instance'");
  }
  return src;
}

inline absl::StatusOr<MetricSpec> ParseMetric(const nlohmann::json& j) {
  MetricSpec m;
  if (j.is_string()) {
    m.name = j.get<std::string>();
    return m;
  }
  if (!j.is_object()) {
    return absl::InvalidArgumentError("metric must be a string or object");
  }
  DPDD_RETURN_IF_ERROR(CheckKeys(j, {"name", "p"}, "metric"));
  m.name = j.at("name").get<std::string>();
  if (j.contains("p")) {
    const auto& p = j.at("p");
    if (p.is_string() && (p.get<std::string>() == "inf")) {
      m.p = std::numeric_limits<double>::infinity();
    } else {
      m.p = p.get<double>();
    }
  }
  return m;
}

}  // namespace internal

// Parses the SweepSpec JSON document described in README.md.
inline absl::StatusOr<SweepSpec> ParseSweepSpec(const nlohmann::json& j) {
  try {
    if (!j.is_object()) {
      return absl::InvalidArgumentError("sweep spec must be a JSON object");
    }
    DPDD_RETURN_IF_ERROR(internal::CheckKeys(
        j,
        {"task", "dataset_id", "epsilon", "delta", "split", "delta0_grid",
         "k_grid", "trials", "seed", "data", "metrics", "noise"},
        "sweep spec"));
    SweepSpec spec;
    DPDD_ASSIGN_OR_RETURN(spec.task, ParseTask(j.at("task").get<std::string>()));
    spec.dataset_id = j.value("dataset_id", std::string("dataset"));
    spec.budget.epsilon = j.at("epsilon").get<double>();
    spec.budget.delta = j.at("delta").get<double>();
    if (j.contains("split")) {
      const auto split = j.at("split").get<std::vector<double>>();
      if (split.size() != 2) {
        return absl::InvalidArgumentError("split must have two entries");
      }
      spec.budget.split = {split[0], split[1]};
    }
    spec.delta0_grid = j.at("delta0_grid").get<std::vector<int64_t>>();
    spec.k_grid = j.value("k_grid", std::vector<int64_t>{});
    spec.trials = j.value("trials", int64_t{5});
    spec.seed = j.value("seed", uint64_t{0});
    DPDD_ASSIGN_OR_RETURN(spec.data, internal::ParseDataSource(j.at("data")));
    for (const auto& m : j.at("metrics")) {
      DPDD_ASSIGN_OR_RETURN(MetricSpec metric, internal::ParseMetric(m));
      spec.metrics.push_back(std::move(metric));
    }
    DPDD_ASSIGN_OR_RETURN(spec.noise, ParseNoiseMode(j.value(
                                          "noise", std::string("calibrated"))));
    DPDD_RETURN_IF_ERROR(spec.Validate());
    return spec;
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed sweep spec: ", e.what()));
  }
}

inline absl::StatusOr<Dataset> LoadDataSource(const DataSource& src) {
  switch (src.kind) {
    case DataSource::Kind::kCsv: {
      std::ifstream in(src.path);
      if (!in) {
        return absl::NotFoundError(
            absl::StrCat("cannot open dataset '", src.path, "'"));
      }
      return IngestPairs(in, {.has_header = src.has_header});
    }
    case DataSource::Kind::kZipf:
      return GenerateZipf(src.zipf, src.n_items, src.n_users, src.data_seed);
    case DataSource::Kind::kSingleton:
      return HardInstanceSingleton(src.n);
    case DataSource::Kind::kFlat:
      return HardInstanceFlat(src.k, src.b);
  }
  return absl::InternalError("unhandled data source");
}

// Seed of one trial, a function of (master seed, grid index, trial index).
inline uint64_t TrialSeed(uint64_t master, uint64_t grid_index,
                          uint64_t trial) {
  return DeriveSeed(DeriveSeed(master, grid_index), trial);
}

namespace internal {

struct GridPoint {
  int64_t delta0 = 0;
  int64_t k = 0;
  MetaCalibration calibration;
  // Instance references that do not depend on the mechanism output.
  std::optional<int64_t> opt_hits;
  std::optional<int64_t> greedy_hits;
};

inline absl::StatusOr<double> EvaluateMetric(const MetricSpec& m,
                                             const Dataset& d,
                                             const ItemSequence& output,
                                             const GridPoint& point) {
  const ItemSet as_set = MakeItemSet(output);
  if (m.name == "MM") return MissingMass(d, as_set);
  if (m.name == "MM_p") return MissingMassP(d, as_set, m.p);
  if (m.name == "MM_topk") return MissingMassTopK(d, output, point.k);
  if (m.name == "L1_topk") {
    DPDD_ASSIGN_OR_RETURN(int64_t loss, L1TopK(d, output, point.k));
    return static_cast<double>(loss);
  }
  if (m.name == "Hits") return static_cast<double>(Hits(d, as_set));
  if (m.name == "MissedUsers") {
    return static_cast<double>(MissedUsers(d, as_set));
  }
  if (m.name == "Opt") return static_cast<double>(*point.opt_hits);
  if (m.name == "GreedyHits") return static_cast<double>(*point.greedy_hits);
  return absl::InvalidArgumentError(absl::StrCat("unknown metric ", m.name));
}

}  // namespace internal

// Runs every (grid point, trial) pair on `d`. Calibration happens once per
// grid point. Trials may run on `threads` workers; rows come back in
// canonical order (grid point, trial, metric) regardless.
inline absl::StatusOr<std::vector<ResultRow>> RunSweep(const SweepSpec& spec,
                                                       const Dataset& d,
                                                       int threads = 1) {
  DPDD_RETURN_IF_ERROR(spec.Validate());
  std::vector<internal::GridPoint> grid;
  const std::vector<int64_t> ks =
      spec.task == Task::kSetUnion ? std::vector<int64_t>{0} : spec.k_grid;
  const bool wants_opt = std::any_of(
      spec.metrics.begin(), spec.metrics.end(),
      [](const MetricSpec& m) { return m.name == "Opt"; });
  const bool wants_greedy = std::any_of(
      spec.metrics.begin(), spec.metrics.end(),
      [](const MetricSpec& m) { return m.name == "GreedyHits"; });
  for (int64_t delta0 : spec.delta0_grid) {
    for (int64_t k : ks) {
      internal::GridPoint point;
      point.delta0 = delta0;
      point.k = k;
      if (spec.task == Task::kSetUnion) {
        DPDD_ASSIGN_OR_RETURN(
            point.calibration.wgm,
            CalibrateWgm(spec.budget.epsilon, spec.budget.delta, delta0));
        point.calibration.scale.lambda = 0;
      } else {
        DPDD_ASSIGN_OR_RETURN(point.calibration,
                              CalibrateMeta(spec.budget, delta0, k));
      }
      if (wants_opt) {
        DPDD_ASSIGN_OR_RETURN(OptResult opt, OptBruteforce(d, k));
        point.opt_hits = opt.hits;
      }
      if (wants_greedy) {
        point.greedy_hits = Hits(d, MakeItemSet(GreedyHits(d, d.Union(), k)));
      }
      grid.push_back(std::move(point));
    }
  }

  const size_t n_jobs = grid.size() * static_cast<size_t>(spec.trials);
  std::vector<std::vector<ResultRow>> slots(n_jobs);
  std::vector<absl::Status> errors(n_jobs);
  auto run_job = [&](size_t job) {
    const size_t g = job / spec.trials;
    const auto trial = static_cast<int64_t>(job % spec.trials);
    const internal::GridPoint& point = grid[g];
    const uint64_t seed = TrialSeed(spec.seed, g, trial);
    const auto start = std::chrono::steady_clock::now();

    ItemSequence output;
    if (spec.task == Task::kSetUnion) {
      auto run = Wgm(d, point.calibration.wgm, spec.noise, seed);
      if (!run.ok()) {
        errors[job] = run.status();
        return;
      }
      output = std::move(run->released);
    } else {
      auto run = RunMeta(d, point.calibration, point.k, spec.task, spec.noise,
                         seed);
      if (!run.ok()) {
        errors[job] = run.status();
        return;
      }
      output = run->items();
    }
    std::vector<ResultRow>& rows = slots[job];
    for (const MetricSpec& m : spec.metrics) {
      auto value = internal::EvaluateMetric(m, d, output, point);
      if (!value.ok()) {
        errors[job] = value.status();
        return;
      }
      ResultRow row;
      row.task = TaskToString(spec.task);
      row.dataset_id = spec.dataset_id;
      row.eps = spec.budget.epsilon;
      row.delta = spec.budget.delta;
      row.delta0 = point.delta0;
      row.k = point.k;
      row.trial = trial;
      row.seed = seed;
      row.metric_name = m.Label();
      row.value = *value;
      row.sigma = point.calibration.wgm.sigma;
      row.threshold = point.calibration.wgm.threshold;
      row.lambda = point.calibration.scale.lambda;
      rows.push_back(std::move(row));
    }
    const double elapsed = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    for (ResultRow& row : rows) row.wall_time_ms = elapsed;
  };

  const int workers =
      std::max(1, std::min<int>(threads, static_cast<int>(n_jobs)));
  if (workers == 1) {
    for (size_t job = 0; job < n_jobs; ++job) run_job(job);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (size_t job = next++; job < n_jobs; job = next++) run_job(job);
      });
    }
  }
  for (const absl::Status& status : errors) {
    if (!status.ok()) return status;
  }
  std::vector<ResultRow> rows;
  rows.reserve(n_jobs * spec.metrics.size());
  for (auto& slot : slots) {
    for (auto& row : slot) rows.push_back(std::move(row));
  }
  return rows;
}

inline absl::StatusOr<std::vector<ResultRow>> RunSweep(const SweepSpec& spec,
                                                       int threads = 1) {
  DPDD_ASSIGN_OR_RETURN(Dataset d, LoadDataSource(spec.data));
  return RunSweep(spec, d, threads);
}

// Mean and standard error (sample std / sqrt(trials)) per grid point and
// metric, in first-appearance order.
inline std::vector<SummaryRow> Aggregate(const std::vector<ResultRow>& rows) {
  using Key = std::tuple<std::string, std::string, double, double, int64_t,
                         int64_t, std::string>;
  std::map<Key, size_t> index;
  std::vector<SummaryRow> out;
  std::vector<std::vector<double>> values;
  for (const ResultRow& r : rows) {
    Key key{r.task, r.dataset_id, r.eps, r.delta, r.delta0, r.k,
            r.metric_name};
    auto [it, inserted] = index.try_emplace(key, out.size());
    if (inserted) {
      SummaryRow s;
      s.task = r.task;
      s.dataset_id = r.dataset_id;
      s.eps = r.eps;
      s.delta = r.delta;
      s.delta0 = r.delta0;
      s.k = r.k;
      s.metric_name = r.metric_name;
      out.push_back(std::move(s));
      values.emplace_back();
    }
    values[it->second].push_back(r.value);
  }
  for (size_t i = 0; i < out.size(); ++i) {
    const std::vector<double>& v = values[i];
    const auto n = static_cast<double>(v.size());
    double mean = 0;
    for (double x : v) mean += x;
    mean /= n;
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    out[i].trials = static_cast<int64_t>(v.size());
    out[i].mean = mean;
    out[i].std_error = v.size() > 1 ? std::sqrt(ss / (n - 1)) / std::sqrt(n)
                                    : 0.0;
  }
  return out;
}

namespace internal {

inline std::string FormatDouble(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

// The value that a 9-significant-digit rendering parses back to.
inline double Round9(double x) { return std::strtod(FormatDouble(x).c_str(), nullptr); }

inline std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Splits one CSV record, honouring double-quoted fields.
inline std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  return fields;
}

}  // namespace internal

inline constexpr const char* kResultCsvHeader =
    "task,dataset_id,eps,delta,delta0,k,trial,seed,metric_name,value,"
    "wall_time_ms,sigma,threshold,lambda";
inline constexpr const char* kSummaryCsvHeader =
    "task,dataset_id,eps,delta,delta0,k,metric_name,trials,mean,std_error";

inline void WriteRows(const std::vector<ResultRow>& rows, OutputFormat format,
                      std::ostream& out) {
  using internal::CsvField;
  using internal::FormatDouble;
  using internal::Round9;
  if (format == OutputFormat::kCsv) {
    out << kResultCsvHeader << '\n';
    for (const ResultRow& r : rows) {
      out << CsvField(r.task) << ',' << CsvField(r.dataset_id) << ','
          << FormatDouble(r.eps) << ',' << FormatDouble(r.delta) << ','
          << r.delta0 << ',' << r.k << ',' << r.trial << ',' << r.seed << ','
          << CsvField(r.metric_name) << ',' << FormatDouble(r.value) << ','
          << FormatDouble(r.wall_time_ms) << ',' << FormatDouble(r.sigma)
          << ',' << FormatDouble(r.threshold) << ','
          << FormatDouble(r.lambda) << '\n';
    }
    return;
  }
  nlohmann::json arr = nlohmann::json::array();
  for (const ResultRow& r : rows) {
    arr.push_back({{"task", r.task},
                   {"dataset_id", r.dataset_id},
                   {"eps", Round9(r.eps)},
                   {"delta", Round9(r.delta)},
                   {"delta0", r.delta0},
                   {"k", r.k},
                   {"trial", r.trial},
                   {"seed", r.seed},
                   {"metric_name", r.metric_name},
                   {"value", Round9(r.value)},
                   {"wall_time_ms", Round9(r.wall_time_ms)},
                   {"sigma", Round9(r.sigma)},
                   {"threshold", Round9(r.threshold)},
                   {"lambda", Round9(r.lambda)}});
  }
  out << arr.dump(2) << '\n';
}

inline void WriteSummaries(const std::vector<SummaryRow>& rows,
                           OutputFormat format, std::ostream& out) {
  using internal::CsvField;
  using internal::FormatDouble;
  using internal::Round9;
  if (format == OutputFormat::kCsv) {
    out << kSummaryCsvHeader << '\n';
    for (const SummaryRow& r : rows) {
      out << CsvField(r.task) << ',' << CsvField(r.dataset_id) << ','
          << FormatDouble(r.eps) << ',' << FormatDouble(r.delta) << ','
          << r.delta0 << ',' << r.k << ',' << CsvField(r.metric_name) << ','
          << r.trials << ',' << FormatDouble(r.mean) << ','
          << FormatDouble(r.std_error) << '\n';
    }
    return;
  }
  nlohmann::json arr = nlohmann::json::array();
  for (const SummaryRow& r : rows) {
    arr.push_back({{"task", r.task},
                   {"dataset_id", r.dataset_id},
                   {"eps", Round9(r.eps)},
                   {"delta", Round9(r.delta)},
                   {"delta0", r.delta0},
                   {"k", r.k},
                   {"metric_name", r.metric_name},
                   {"trials", r.trials},
                   {"mean", Round9(r.mean)},
                   {"std_error", Round9(r.std_error)}});
  }
  out << arr.dump(2) << '\n';
}

// Writes `rows` to `path`; "-" means standard output.
template <typename Row>
absl::Status EmitToFile(const std::vector<Row>& rows, OutputFormat format,
                        const std::string& path) {
  auto write = [&](std::ostream& out) {
    if constexpr (std::is_same_v<Row, ResultRow>) {
      WriteRows(rows, format, out);
    } else {
      WriteSummaries(rows, format, out);
    }
  };
  if (path == "-") {
    write(std::cout);
    return std::cout ? absl::OkStatus()
                     : absl::DataLossError("failed writing standard output");
  }
  std::ofstream out(path);
  if (!out) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot open '", path, "' for writing"));
  }
  write(out);
  out.flush();
  if (!out) return absl::DataLossError(absl::StrCat("failed writing '", path, "'"));
  return absl::OkStatus();
}

// Reads rows written by WriteRows in CSV format.
inline absl::StatusOr<std::vector<ResultRow>> ParseRowsCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kResultCsvHeader) {
    return absl::InvalidArgumentError("missing or unexpected CSV header");
  }
  std::vector<ResultRow> rows;
  int64_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const std::vector<std::string> f = internal::SplitCsv(line);
    if (f.size() != 14) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_number, ": expected 14 fields"));
    }
    try {
      ResultRow r;
      r.task = f[0];
      r.dataset_id = f[1];
      r.eps = std::stod(f[2]);
      r.delta = std::stod(f[3]);
      r.delta0 = std::stoll(f[4]);
      r.k = std::stoll(f[5]);
      r.trial = std::stoll(f[6]);
      r.seed = std::stoull(f[7]);
      r.metric_name = f[8];
      r.value = std::stod(f[9]);
      r.wall_time_ms = std::stod(f[10]);
      r.sigma = std::stod(f[11]);
      r.threshold = std::stod(f[12]);
      r.lambda = std::stod(f[13]);
      rows.push_back(std::move(r));
    } catch (const std::exception&) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_number, ": malformed number"));
    }
  }
  return rows;
}

}  // namespace dp_domain_discovery

#endif  // DP_DOMAIN_DISCOVERY_HARNESS_H_
