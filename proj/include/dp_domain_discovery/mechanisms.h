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

// The randomized domain-discovery mechanisms:
//  * Wgm: weighted Gaussian mechanism for private set union.
//  * PeelingTopK: Gumbel-noise peeling exponential mechanism over a known
//    domain.
//  * UserPeelingHits: private greedy k-hitting set over a known domain.
//  * RunMeta: WGM to discover a domain, then one of the two known-domain
//    mechanisms on it, each stage with its share of the budget.
//
// Every mechanism is a pure function of (inputs, seed). Stages and users
// draw from independent substreams derived with DeriveSeed.

#ifndef DP_DOMAIN_DISCOVERY_MECHANISMS_H_
#define DP_DOMAIN_DISCOVERY_MECHANISMS_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "dp_domain_discovery/calibration.h"
#include "dp_domain_discovery/dataset.h"
#include "dp_domain_discovery/random.h"
#include "dp_domain_discovery/status_macros.h"

namespace dp_domain_discovery {

// kDisabled skips all noise. It exists for oracle tests and is NOT private;
// serialized outputs produced with it carry "non_private": true.
enum class NoiseMode { kCalibrated, kDisabled };

enum class Task { kSetUnion, kTopK, kHittingSet };

inline const char* TaskToString(Task task) {
  switch (task) {
    case Task::kSetUnion:
      return "set_union";
    case Task::kTopK:
      return "top_k";
    case Task::kHittingSet:
      return "hitting_set";
  }
  return "unknown";
}

struct ItemValue {
  ItemId item;
  double value;
};

// White-box record of one WGM execution.
struct WgmTrace {
  Dataset subsampled;
  // Weight |W~_i|^{-1/2} applied to each user's kept items; 0 if none kept.
  std::vector<double> user_weights;
  // Over the subsampled union, sorted by id.
  std::vector<ItemValue> weighted_counts;
  std::vector<ItemValue> noisy_counts;
  double sigma = 0.0;
  double threshold = 0.0;
  // min(1, delta0 / max_i |W_i|).
  double p_star = 1.0;
  // min(delta0, max_i |W_i|).
  int64_t q_star = 0;
  bool non_private = false;
};

struct WgmResult {
  ItemSet released;
  WgmTrace trace;
};

struct TopKOutput {
  ItemSequence items;
  std::vector<double> noisy_scores;
  bool non_private = false;
};

struct HittingSetOutput {
  ItemSequence items;
  // Cumulative number of users hit after each round.
  std::vector<int64_t> users_hit_per_round;
  bool non_private = false;
};

// Weighted Gaussian mechanism. Subsamples every user to at most delta0
// items, sums weights |W~_i|^{-1/2} per item, adds N(0, sigma^2) to each
// weighted count and releases the items whose noisy count reaches the
// threshold.
inline absl::StatusOr<WgmResult> Wgm(const Dataset& d, const WgmConfig& config,
                                     NoiseMode mode, uint64_t seed) {
  DPDD_RETURN_IF_ERROR(config.Validate());
  WgmResult result;
  WgmTrace& trace = result.trace;
  trace.sigma = config.sigma;
  trace.threshold = config.threshold;
  trace.non_private = mode == NoiseMode::kDisabled;
  trace.q_star = std::min(config.delta0, d.max_user_set_size());
  trace.p_star = d.max_user_set_size() == 0
                     ? 1.0
                     : std::min(1.0, static_cast<double>(config.delta0) /
                                         static_cast<double>(
                                             d.max_user_set_size()));

  trace.subsampled =
      Subsample(d, config.delta0, DeriveSeed(seed, kSubsampleStream));
  const Dataset& sub = trace.subsampled;

  std::vector<double> histogram(d.label_count(), 0.0);
  trace.user_weights.reserve(sub.users().size());
  for (const auto& user : sub.users()) {
    if (user.empty()) {
      trace.user_weights.push_back(0.0);
      continue;
    }
    const double weight = 1.0 / std::sqrt(static_cast<double>(user.size()));
    trace.user_weights.push_back(weight);
    for (ItemId x : user) histogram[x] += weight;
  }

  Rng noise(DeriveSeed(seed, kGaussianNoiseStream));
  trace.weighted_counts.reserve(sub.Union().size());
  trace.noisy_counts.reserve(sub.Union().size());
  for (ItemId x : sub.Union()) {
    const double weighted = histogram[x];
    const double noisy = mode == NoiseMode::kCalibrated
                             ? weighted + noise.Gaussian(config.sigma)
                             : weighted;
    trace.weighted_counts.push_back({x, weighted});
    trace.noisy_counts.push_back({x, noisy});
    if (noisy >= config.threshold) result.released.push_back(x);
  }
  return result;
}

// Integer numerators (over N) of the two parts of MM(W, S) for a WGM run:
// mass lost to subsampling and mass lost to thresholding.
struct MissingMassDecomposition {
  int64_t subsampling_missed = 0;
  int64_t threshold_missed = 0;
  int64_t total_items = 0;
};

inline MissingMassDecomposition DecomposeMissingMass(const Dataset& d,
                                                     const WgmResult& run) {
  MissingMassDecomposition out;
  out.total_items = d.total_items();
  int64_t kept_mass = 0;
  for (ItemId x : run.trace.subsampled.Union()) kept_mass += d.Frequency(x);
  out.subsampling_missed = d.total_items() - kept_mass;
  std::vector<char> released(d.label_count(), 0);
  for (ItemId x : run.released) released[x] = 1;
  for (ItemId x : run.trace.subsampled.Union()) {
    if (!released[x]) out.threshold_missed += d.Frequency(x);
  }
  return out;
}

namespace internal {

inline absl::StatusOr<ItemSet> ValidateDomain(const Dataset& d,
                                              std::span<const ItemId> domain,
                                              int64_t k) {
  if (k < 1) {
    return absl::InvalidArgumentError(absl::StrCat("k must be >= 1, got ", k));
  }
  ItemSet items = MakeItemSet({domain.begin(), domain.end()});
  for (ItemId x : items) {
    if (!d.Contains(x)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "domain item id ", x, " does not occur in the dataset"));
    }
  }
  return items;
}

}  // namespace internal

// Peeling exponential mechanism: one Gumbel(lambda) draw per domain item on
// top of its count, then the min(k, |domain|) largest noisy counts in
// decreasing order. Ties go to the lower id.
inline absl::StatusOr<TopKOutput> PeelingTopK(const Dataset& d,
                                              std::span<const ItemId> domain,
                                              int64_t k,
                                              const GumbelScale& scale,
                                              NoiseMode mode, uint64_t seed) {
  DPDD_ASSIGN_OR_RETURN(ItemSet items, internal::ValidateDomain(d, domain, k));
  Rng rng(seed);
  std::vector<ItemValue> scored;
  scored.reserve(items.size());
  for (ItemId x : items) {
    double score = static_cast<double>(d.Frequency(x));
    if (mode == NoiseMode::kCalibrated) score += rng.Gumbel(scale.lambda);
    scored.push_back({x, score});
  }
  const size_t q = std::min<size_t>(static_cast<size_t>(k), scored.size());
  auto by_score = [](const ItemValue& a, const ItemValue& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.item < b.item;
  };
  std::partial_sort(scored.begin(), scored.begin() + q, scored.end(),
                    by_score);
  TopKOutput out;
  out.non_private = mode == NoiseMode::kDisabled;
  for (size_t i = 0; i < q; ++i) {
    out.items.push_back(scored[i].item);
    out.noisy_scores.push_back(scored[i].value);
  }
  return out;
}

// User peeling: each round counts, over users not yet hit, how many hold
// each remaining domain item, adds fresh Gumbel(lambda) noise, takes the
// arg-max (ties to the lower id) and drops the users it hits. Stops after k
// rounds or when the domain or the user pool is exhausted. With noise
// disabled it also stops once no remaining item has a positive count, which
// makes it the plain greedy algorithm.
inline absl::StatusOr<HittingSetOutput> UserPeelingHits(
    const Dataset& d, std::span<const ItemId> domain, int64_t k,
    const GumbelScale& scale, NoiseMode mode, uint64_t seed) {
  DPDD_ASSIGN_OR_RETURN(ItemSet remaining,
                        internal::ValidateDomain(d, domain, k));
  std::vector<char> in_domain(d.label_count(), 0);
  for (ItemId x : remaining) in_domain[x] = 1;
  std::vector<uint32_t> alive(d.users().size());
  for (uint32_t i = 0; i < alive.size(); ++i) alive[i] = i;

  HittingSetOutput out;
  out.non_private = mode == NoiseMode::kDisabled;
  std::vector<int64_t> counts(d.label_count(), 0);
  int64_t hit_so_far = 0;
  for (int64_t round = 0; round < k; ++round) {
    if (remaining.empty() || alive.empty()) break;
    for (uint32_t i : alive) {
      for (ItemId x : d.user(i)) {
        if (in_domain[x]) ++counts[x];
      }
    }
    Rng rng(DeriveSeed(seed, static_cast<uint64_t>(round)));
    ItemId best = remaining.front();
    double best_score = -std::numeric_limits<double>::infinity();
    for (ItemId x : remaining) {
      double score = static_cast<double>(counts[x]);
      if (mode == NoiseMode::kCalibrated) score += rng.Gumbel(scale.lambda);
      if (score > best_score) {
        best_score = score;
        best = x;
      }
    }
    const bool no_gain = counts[best] == 0;
    for (ItemId x : remaining) counts[x] = 0;
    if (mode == NoiseMode::kDisabled && no_gain) break;

    out.items.push_back(best);
    in_domain[best] = 0;
    remaining.erase(std::lower_bound(remaining.begin(), remaining.end(), best));
    const size_t before = alive.size();
    std::erase_if(alive, [&](uint32_t i) {
      std::span<const ItemId> user = d.user(i);
      return std::binary_search(user.begin(), user.end(), best);
    });
    hit_so_far += static_cast<int64_t>(before - alive.size());
    out.users_hit_per_round.push_back(hit_so_far);
  }
  return out;
}

// Parameters of both stages of a composed run, computed once per
// (budget, delta0, k).
struct MetaCalibration {
  WgmConfig wgm;
  GumbelScale scale;
};

// Stage 1 gets (eps * split[0], delta * split[0]) for the WGM and stage 2
// gets (eps * split[1], delta * split[1]) for the Gumbel scale.
inline absl::StatusOr<MetaCalibration> CalibrateMeta(
    const PrivacyBudget& budget, int64_t delta0, int64_t k) {
  DPDD_RETURN_IF_ERROR(budget.Validate());
  const PrivacyBudget first = budget.Stage(0);
  const PrivacyBudget second = budget.Stage(1);
  MetaCalibration calibration;
  DPDD_ASSIGN_OR_RETURN(calibration.wgm,
                        CalibrateWgm(first.epsilon, first.delta, delta0));
  DPDD_ASSIGN_OR_RETURN(
      calibration.scale,
      ComputeGumbelScale(second.epsilon, second.delta, k));
  return calibration;
}

struct MetaResult {
  Task task = Task::kTopK;
  MetaCalibration calibration;
  WgmResult wgm;
  std::optional<TopKOutput> top_k;
  std::optional<HittingSetOutput> hitting_set;

  // The stage-2 output as an item sequence.
  const ItemSequence& items() const {
    return top_k.has_value() ? top_k->items : hitting_set->items;
  }
};

// WGM discovers a domain, then the task mechanism runs on it. An empty
// domain yields an empty stage-2 output.
inline absl::StatusOr<MetaResult> RunMeta(const Dataset& d,
                                          const MetaCalibration& calibration,
                                          int64_t k, Task task,
                                          NoiseMode mode, uint64_t seed) {
  if (task == Task::kSetUnion) {
    return absl::InvalidArgumentError(
        "the composed mechanism runs top_k or hitting_set, not set_union");
  }
  if (k < 1) {
    return absl::InvalidArgumentError(absl::StrCat("k must be >= 1, got ", k));
  }
  MetaResult result;
  result.task = task;
  result.calibration = calibration;
  DPDD_ASSIGN_OR_RETURN(result.wgm,
                        Wgm(d, calibration.wgm, mode,
                            DeriveSeed(seed, kWgmStageStream)));
  const ItemSet& domain = result.wgm.released;
  const uint64_t stage_seed = DeriveSeed(seed, kSelectionStageStream);
  if (task == Task::kTopK) {
    DPDD_ASSIGN_OR_RETURN(result.top_k,
                          PeelingTopK(d, domain, k, calibration.scale, mode,
                                      stage_seed));
  } else {
    DPDD_ASSIGN_OR_RETURN(result.hitting_set,
                          UserPeelingHits(d, domain, k, calibration.scale,
                                          mode, stage_seed));
  }
  return result;
}

inline absl::StatusOr<MetaResult> RunMeta(const Dataset& d,
                                          const PrivacyBudget& budget,
                                          int64_t delta0, int64_t k, Task task,
                                          NoiseMode mode, uint64_t seed) {
  DPDD_ASSIGN_OR_RETURN(MetaCalibration calibration,
                        CalibrateMeta(budget, delta0, k));
  return RunMeta(d, calibration, k, task, mode, seed);
}

}  // namespace dp_domain_discovery

#endif  // DP_DOMAIN_DISCOVERY_MECHANISMS_H_
