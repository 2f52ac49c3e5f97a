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

// dpdd: command-line front end for the domain-discovery toolkit.
//
//   dpdd calibrate   --eps E --delta D --delta0 B [--k K]
//   dpdd stats       --input pairs.csv [--header] [--rank-freq-csv F]
//                    [--ecdf-csv F] [--out F]
//   dpdd gen-zipf    --C C --s S --items M --users N [--seed X] [--out F]
//   dpdd set-union   --eps E --delta D --delta0 B (--input F | --zipf C,s,M,N)
//   dpdd top-k       ... --k K
//   dpdd hitting-set ... --k K
//   dpdd sweep       --spec spec.json [--out F] [--format csv|json]
//
// JSON goes to standard output unless --out is given. Flag errors exit with
// 2, runtime errors with 1; diagnostics are one line on standard error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "dp_domain_discovery.h"
#include "nlohmann/json.hpp"

namespace dpdd = ::dp_domain_discovery;
using nlohmann::json;

namespace {

constexpr uint64_t kDefaultSeed = 42;
constexpr int kRuntimeErrorExit = 1;
constexpr int kUsageErrorExit = 2;

int Fail(const absl::Status& status) {
  std::cerr << "dpdd: error: " << absl::StatusCodeToString(status.code())
            << ": " << status.message() << '\n';
  return kRuntimeErrorExit;
}

absl::Status WriteText(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return absl::OkStatus();
  }
  std::ofstream file(out, std::ios::binary);
  if (!file) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot open '", out, "' for writing"));
  }
  file << text;
  return file ? absl::OkStatus()
              : absl::DataLossError(absl::StrCat("failed writing '", out, "'"));
}

absl::StatusOr<uint64_t> ParseSeed(const std::string& text) {
  if (text == "random") {
    std::random_device entropy;
    return (static_cast<uint64_t>(entropy()) << 32) | entropy();
  }
  try {
    size_t used = 0;
    const uint64_t seed = std::stoull(text, &used);
    if (used == text.size()) return seed;
  } catch (const std::exception&) {
  }
  return absl::InvalidArgumentError(
      absl::StrCat("--seed must be an unsigned integer or 'random', got '",
                   text, "'"));
}

absl::StatusOr<dpdd::Dataset> ReadPairsFile(const std::string& path,
                                            bool header,
                                            dpdd::IngestDiagnostics* diag) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(absl::StrCat("cannot open '", path, "'"));
  }
  return dpdd::IngestPairs(in, {.has_header = header}, diag);
}

json LabelsOf(const dpdd::Dataset& d, const dpdd::ItemSequence& items) {
  json out = json::array();
  for (dpdd::ItemId x : items) out.push_back(d.item_label(x));
  return out;
}

// ---------------------------------------------------------------- calibrate

struct CalibrateArgs {
  double eps = 0;
  double delta = 0;
  int64_t delta0 = 0;
  int64_t k = 0;
  std::string out;
};

int RunCalibrate(const CalibrateArgs& a) {
  auto config = dpdd::CalibrateWgm(a.eps, a.delta, a.delta0);
  if (!config.ok()) return Fail(config.status());
  auto b_star = dpdd::LowerBoundFrequency(a.eps, a.delta);
  if (!b_star.ok()) return Fail(b_star.status());
  json j = {{"epsilon", a.eps},   {"delta", a.delta},
            {"delta0", a.delta0}, {"sigma", config->sigma},
            {"T", config->threshold}, {"b_star", *b_star}};
  if (a.k > 0) {
    auto scale = dpdd::ComputeGumbelScale(a.eps, a.delta, a.k);
    if (!scale.ok()) return Fail(scale.status());
    j["k"] = a.k;
    j["lambda"] = scale->lambda;
    j["eps0"] = scale->eps0;
  }
  absl::Status s = WriteText(j.dump(2) + "\n", a.out);
  return s.ok() ? 0 : Fail(s);
}

// -------------------------------------------------------------------- stats

struct StatsArgs {
  std::string input;
  bool header = false;
  std::string out;
  std::string rank_freq_csv;
  std::string ecdf_csv;
};

int RunStats(const StatsArgs& a) {
  dpdd::IngestDiagnostics diag;
  auto d = ReadPairsFile(a.input, a.header, &diag);
  if (!d.ok()) return Fail(d.status());
  const dpdd::DatasetStats stats = dpdd::ComputeStats(*d);
  json ecdf = json::array();
  for (const auto& [size, frac] : stats.ecdf) ecdf.push_back({size, frac});
  json rank_freq = json::array();
  for (const auto& [rank, f] : stats.rank_freq) rank_freq.push_back({rank, f});
  json j = {{"n_users", stats.n_users},
            {"n_items", stats.n_items},
            {"n_entries", stats.n_entries},
            {"max_user_set_size", stats.max_user_set_size},
            {"rows", diag.rows},
            {"duplicates_collapsed", diag.duplicates_collapsed},
            {"ecdf", ecdf},
            {"rank_freq", rank_freq}};
  if (!a.rank_freq_csv.empty()) {
    std::ostringstream csv;
    csv << "rank,frequency\n";
    for (const auto& [rank, f] : stats.rank_freq) {
      csv << rank << ',' << f << '\n';
    }
    if (absl::Status s = WriteText(csv.str(), a.rank_freq_csv); !s.ok()) {
      return Fail(s);
    }
  }
  if (!a.ecdf_csv.empty()) {
    std::ostringstream csv;
    csv << "set_size,cum_fraction\n";
    for (const auto& [size, frac] : stats.ecdf) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.9g", frac);
      csv << size << ',' << buf << '\n';
    }
    if (absl::Status s = WriteText(csv.str(), a.ecdf_csv); !s.ok()) {
      return Fail(s);
    }
  }
  absl::Status s = WriteText(j.dump(2) + "\n", a.out);
  return s.ok() ? 0 : Fail(s);
}

// ----------------------------------------------------------------- gen-zipf

struct GenZipfArgs {
  double c = 1;
  double s = 2;
  int64_t items = 0;
  int64_t users = 0;
  std::string seed = std::to_string(kDefaultSeed);
  std::string out;
};

int RunGenZipf(const GenZipfArgs& a) {
  auto seed = ParseSeed(a.seed);
  if (!seed.ok()) return Fail(seed.status());
  auto d = dpdd::GenerateZipf({a.c, a.s}, a.items, a.users, *seed);
  if (!d.ok()) return Fail(d.status());
  std::ostringstream csv;
  dpdd::WritePairs(*d, csv);
  absl::Status s = WriteText(csv.str(), a.out);
  return s.ok() ? 0 : Fail(s);
}

// --------------------------------------------------------------- mechanisms

struct MechanismArgs {
  double eps = 1.0;
  double delta = 1e-5;
  int64_t delta0 = 100;
  int64_t k = 0;
  std::string seed = std::to_string(kDefaultSeed);
  int64_t trials = 1;
  std::string input;
  bool header = false;
  std::string zipf;
  std::string noise = "calibrated";
  std::vector<double> split = {0.5, 0.5};
  std::string out;
};

absl::StatusOr<dpdd::Dataset> LoadMechanismData(const MechanismArgs& a,
                                                uint64_t seed, json& info) {
  if (!a.input.empty()) {
    info = {{"input", a.input}};
    return ReadPairsFile(a.input, a.header, nullptr);
  }
  std::vector<std::string> parts = absl::StrSplit(a.zipf, ',');
  if (parts.size() != 4) {
    return absl::InvalidArgumentError("--zipf expects C,s,n_items,n");
  }
  try {
    const double c = std::stod(parts[0]);
    const double s = std::stod(parts[1]);
    const int64_t n_items = std::stoll(parts[2]);
    const int64_t n = std::stoll(parts[3]);
    const uint64_t data_seed = dpdd::DeriveSeed(seed, dpdd::kDataStream);
    info = {{"zipf", {{"C", c}, {"s", s}, {"items", n_items}, {"users", n}}},
            {"data_seed", data_seed}};
    return dpdd::GenerateZipf({c, s}, n_items, n, data_seed);
  } catch (const std::exception&) {
    return absl::InvalidArgumentError(
        absl::StrCat("--zipf expects numbers C,s,n_items,n, got '", a.zipf,
                     "'"));
  }
}

int RunMechanism(dpdd::Task task, const MechanismArgs& a) {
  auto seed = ParseSeed(a.seed);
  if (!seed.ok()) return Fail(seed.status());
  auto noise = dpdd::ParseNoiseMode(a.noise);
  if (!noise.ok()) return Fail(noise.status());
  if (a.trials < 1) {
    return Fail(absl::InvalidArgumentError("--trials must be >= 1"));
  }
  json data_info;
  auto d = LoadMechanismData(a, *seed, data_info);
  if (!d.ok()) return Fail(d.status());

  dpdd::PrivacyBudget budget{a.eps, a.delta, {a.split[0], a.split[1]}};
  dpdd::MetaCalibration calibration;
  if (task == dpdd::Task::kSetUnion) {
    budget.split = {1.0, 0.0};
    if (absl::Status s = dpdd::ValidateEpsilonDelta(a.eps, a.delta); !s.ok()) {
      return Fail(s);
    }
    auto config = dpdd::CalibrateWgm(a.eps, a.delta, a.delta0);
    if (!config.ok()) return Fail(config.status());
    calibration.wgm = *config;
    calibration.scale.lambda = 0;
  } else {
    auto c = dpdd::CalibrateMeta(budget, a.delta0, a.k);
    if (!c.ok()) return Fail(c.status());
    calibration = *c;
  }

  const bool non_private = *noise == dpdd::NoiseMode::kDisabled;
  json params = {{"epsilon", a.eps},
                 {"delta", a.delta},
                 {"delta0", a.delta0},
                 {"seed", *seed},
                 {"trials", a.trials},
                 {"noise", a.noise},
                 {"sigma", calibration.wgm.sigma},
                 {"T", calibration.wgm.threshold},
                 {"data", data_info}};
  if (task != dpdd::Task::kSetUnion) {
    params["k"] = a.k;
    params["split"] = {budget.split[0], budget.split[1]};
    params["lambda"] = calibration.scale.lambda;
  }
  json trials = json::array();
  for (int64_t t = 0; t < a.trials; ++t) {
    const uint64_t trial_seed = dpdd::TrialSeed(*seed, 0, t);
    json row = {{"trial", t}, {"seed", trial_seed}};
    if (task == dpdd::Task::kSetUnion) {
      auto run = dpdd::Wgm(*d, calibration.wgm, *noise, trial_seed);
      if (!run.ok()) return Fail(run.status());
      row["released_items"] = LabelsOf(*d, run->released);
      row["metrics"] = {
          {"MM", *dpdd::MissingMass(*d, run->released)},
          {"MM_inf", *dpdd::MissingMassP(*d, run->released,
                                         std::numeric_limits<double>::infinity())},
          {"MM_0", *dpdd::MissingMassP(*d, run->released, 0.0)}};
    } else {
      auto run = dpdd::RunMeta(*d, calibration, a.k, task, *noise, trial_seed);
      if (!run.ok()) return Fail(run.status());
      row["domain_size"] = run->wgm.released.size();
      row["sequence"] = LabelsOf(*d, run->items());
      if (task == dpdd::Task::kTopK) {
        row["noisy_scores"] = run->top_k->noisy_scores;
        row["metrics"] = {
            {"MM_topk", *dpdd::MissingMassTopK(*d, run->items(), a.k)},
            {"L1_topk", *dpdd::L1TopK(*d, run->items(), a.k)}};
      } else {
        const dpdd::ItemSet chosen = dpdd::MakeItemSet(run->items());
        row["users_hit_per_round"] = run->hitting_set->users_hit_per_round;
        row["metrics"] = {{"Hits", dpdd::Hits(*d, chosen)},
                          {"MissedUsers", dpdd::MissedUsers(*d, chosen)}};
      }
    }
    trials.push_back(std::move(row));
  }
  json out = {{"command", dpdd::TaskToString(task)},
              {"non_private", non_private},
              {"params", params},
              {"dataset",
               {{"n_users", d->num_users()},
                {"n_items", d->unique_items()},
                {"n_entries", d->total_items()}}},
              {"trials", trials}};
  absl::Status s = WriteText(out.dump(2) + "\n", a.out);
  return s.ok() ? 0 : Fail(s);
}

// -------------------------------------------------------------------- sweep

struct SweepArgs {
  std::string spec;
  std::string out = "-";
  std::string format = "csv";
  int threads = 1;
  bool summary = false;
};

int RunSweepCommand(const SweepArgs& a) {
  std::ifstream in(a.spec);
  if (!in) {
    return Fail(absl::NotFoundError(absl::StrCat("cannot open '", a.spec, "'")));
  }
  json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    return Fail(absl::InvalidArgumentError(
        absl::StrCat("'", a.spec, "' is not valid JSON")));
  }
  auto spec = dpdd::ParseSweepSpec(j);
  if (!spec.ok()) return Fail(spec.status());
  // Relative CSV paths are resolved against the directory of the spec file.
  if (spec->data.kind == dpdd::DataSource::Kind::kCsv) {
    std::filesystem::path p(spec->data.path);
    if (p.is_relative()) {
      spec->data.path =
          (std::filesystem::path(a.spec).parent_path() / p).string();
    }
  }
  auto rows = dpdd::RunSweep(*spec, a.threads);
  if (!rows.ok()) return Fail(rows.status());
  const auto format = a.format == "json" ? dpdd::OutputFormat::kJson
                                         : dpdd::OutputFormat::kCsv;
  absl::Status s =
      a.summary ? dpdd::EmitToFile(dpdd::Aggregate(*rows), format, a.out)
                : dpdd::EmitToFile(*rows, format, a.out);
  return s.ok() ? 0 : Fail(s);
}

void AddMechanismFlags(CLI::App* cmd, MechanismArgs& a, bool needs_k) {
  cmd->add_option("--eps", a.eps, "Total epsilon")->check(CLI::PositiveNumber);
  cmd->add_option("--delta", a.delta, "Total delta")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--delta0", a.delta0, "Per-user contribution bound")
      ->check(CLI::PositiveNumber);
  if (needs_k) {
    cmd->add_option("--k", a.k, "Output size")
        ->required()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--split", a.split,
                    "Budget fractions for the WGM and selection stages")
        ->expected(2);
  }
  cmd->add_option("--seed", a.seed, "Master seed, or 'random'");
  cmd->add_option("--trials", a.trials, "Number of independent runs");
  auto* input = cmd->add_option("--input", a.input, "user_id,item_id CSV");
  auto* zipf =
      cmd->add_option("--zipf", a.zipf, "Synthetic data as C,s,n_items,n");
  input->excludes(zipf);
  cmd->add_flag("--header", a.header, "Input CSV has a header line");
  cmd->add_option("--noise", a.noise, "calibrated | disabled (non-private)")
      ->check(CLI::IsMember({"calibrated", "disabled"}));
  cmd->add_option("--out", a.out, "Output path (default: stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private domain discovery toolkit"};
  app.set_version_flag(
      "--version",
      absl::StrCat("dpdd ", dpdd::kVersion,
                   "\nsigma relative tolerance: ", dpdd::kSigmaRelativeTolerance,
                   "\nquantile absolute tolerance: ",
                   dpdd::kQuantileAbsoluteTolerance,
                   "\nZipf check relative tolerance: 1e-12"));
  app.require_subcommand(1);

  CalibrateArgs calibrate;
  auto* cal = app.add_subcommand("calibrate", "Print WGM and Gumbel parameters");
  cal->add_option("--eps", calibrate.eps)->required()->check(CLI::PositiveNumber);
  cal->add_option("--delta", calibrate.delta)
      ->required()
      ->check(CLI::Range(0.0, 1.0));
  cal->add_option("--delta0", calibrate.delta0)
      ->required()
      ->check(CLI::PositiveNumber);
  cal->add_option("--k", calibrate.k)->check(CLI::PositiveNumber);
  cal->add_option("--out", calibrate.out);

  StatsArgs stats;
  auto* st = app.add_subcommand("stats", "Summarize a user_id,item_id CSV");
  st->add_option("--input", stats.input)->required();
  st->add_flag("--header", stats.header);
  st->add_option("--out", stats.out);
  st->add_option("--rank-freq-csv", stats.rank_freq_csv);
  st->add_option("--ecdf-csv", stats.ecdf_csv);

  GenZipfArgs gen;
  auto* gz = app.add_subcommand("gen-zipf", "Generate a Zipfian dataset");
  gz->add_option("--C", gen.c)->required();
  gz->add_option("--s", gen.s)->required();
  gz->add_option("--items", gen.items)->required();
  gz->add_option("--users", gen.users)->required();
  gz->add_option("--seed", gen.seed);
  gz->add_option("--out", gen.out);

  MechanismArgs union_args, topk_args, hit_args;
  auto* su = app.add_subcommand("set-union", "Weighted Gaussian mechanism");
  AddMechanismFlags(su, union_args, false);
  auto* tk = app.add_subcommand("top-k", "WGM then peeling top-k");
  AddMechanismFlags(tk, topk_args, true);
  auto* hs = app.add_subcommand("hitting-set", "WGM then user peeling");
  AddMechanismFlags(hs, hit_args, true);

  SweepArgs sweep;
  auto* sw = app.add_subcommand("sweep", "Run an experiment grid");
  sw->add_option("--spec", sweep.spec)->required();
  sw->add_option("--out", sweep.out);
  sw->add_option("--format", sweep.format)
      ->check(CLI::IsMember({"csv", "json"}));
  sw->add_option("--threads", sweep.threads)->check(CLI::PositiveNumber);
  sw->add_flag("--summary", sweep.summary,
               "Emit mean and standard error per grid point");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    if (argc <= 1) {
      std::cerr << app.help();
    } else {
      app.exit(e);
    }
    return kUsageErrorExit;
  }

  for (auto* cmd : {su, tk, hs}) {
    if (cmd->parsed() && cmd->count("--input") + cmd->count("--zipf") != 1) {
      std::cerr << "dpdd: error: exactly one of --input or --zipf is required\n";
      return kUsageErrorExit;
    }
  }
  if (cal->parsed()) return RunCalibrate(calibrate);
  if (st->parsed()) return RunStats(stats);
  if (gz->parsed()) return RunGenZipf(gen);
  if (su->parsed()) return RunMechanism(dpdd::Task::kSetUnion, union_args);
  if (tk->parsed()) return RunMechanism(dpdd::Task::kTopK, topk_args);
  if (hs->parsed()) return RunMechanism(dpdd::Task::kHittingSet, hit_args);
  if (sw->parsed()) return RunSweepCommand(sweep);
  return kUsageErrorExit;
}
