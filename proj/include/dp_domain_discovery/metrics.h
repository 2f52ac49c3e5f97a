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

// Utility metrics for released item sets and sequences, plus the exact and
// greedy hitting-set oracles used as references in tests and sweeps.

#ifndef DP_DOMAIN_DISCOVERY_METRICS_H_
#define DP_DOMAIN_DISCOVERY_METRICS_H_

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "dp_domain_discovery/dataset.h"
#include "nlohmann/json.hpp"

namespace dp_domain_discovery {

enum class MetricName {
  kMissingMass,      // MM
  kMissingMassP,     // MM_p
  kMissingMassTopK,  // MM_topk
  kL1TopK,           // L1_topk
  kHits,
  kMissedUsers,
};

inline const char* MetricNameToString(MetricName name) {
  switch (name) {
    case MetricName::kMissingMass:
      return "MM";
    case MetricName::kMissingMassP:
      return "MM_p";
    case MetricName::kMissingMassTopK:
      return "MM_topk";
    case MetricName::kL1TopK:
      return "L1_topk";
    case MetricName::kHits:
      return "Hits";
    case MetricName::kMissedUsers:
      return "MissedUsers";
  }
  return "unknown";
}

struct MetricReport {
  MetricName name = MetricName::kMissingMass;
  double value = 0.0;
  std::map<std::string, double> params;

  // One CSV row: metric_name,params_json,value. The JSON field is quoted.
  std::string ToCsvRow() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [key, v] : params) j[key] = v;
    std::string quoted;
    for (char c : j.dump()) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    char value_buf[32];
    std::snprintf(value_buf, sizeof(value_buf), "%.9g", value);
    return absl::StrCat(MetricNameToString(name), ",\"", quoted, "\",",
                        value_buf);
  }
};

namespace internal {

inline absl::Status RequireNonEmpty(const Dataset& d) {
  if (d.total_items() == 0) {
    return absl::FailedPreconditionError(
        "missing mass is undefined for an empty dataset (N = 0)");
  }
  return absl::OkStatus();
}

// Marks ids of `s` that index the string table. Unknown ids are dropped.
inline std::vector<char> MembershipMask(const Dataset& d,
                                        std::span<const ItemId> s) {
  std::vector<char> mask(d.label_count(), 0);
  for (ItemId x : s) {
    if (x < mask.size()) mask[x] = 1;
  }
  return mask;
}

// Sum of N(x) over the distinct items of `s` that occur in `d`.
inline int64_t CoveredMass(const Dataset& d, std::span<const ItemId> s) {
  std::vector<char> mask = MembershipMask(d, s);
  int64_t covered = 0;
  for (ItemId x : d.Union()) {
    if (mask[x]) covered += d.Frequency(x);
  }
  return covered;
}

// Ordered metrics compare positions, so every item must be known and
// distinct and the sequence may not exceed k.
inline absl::Status ValidateSequence(const Dataset& d,
                                     std::span<const ItemId> s, int64_t k) {
  if (k < 0) return absl::InvalidArgumentError("k must be non-negative");
  if (static_cast<int64_t>(s.size()) > k) {
    return absl::InvalidArgumentError(absl::StrCat(
        "sequence of length ", s.size(), " exceeds k = ", k));
  }
  std::vector<char> seen(d.label_count(), 0);
  for (ItemId x : s) {
    if (!d.Contains(x)) {
      return absl::InvalidArgumentError(
          absl::StrCat("item id ", x, " does not occur in the dataset"));
    }
    if (seen[x]) {
      return absl::InvalidArgumentError(
          absl::StrCat("item '", d.item_label(x), "' repeated in sequence"));
    }
    seen[x] = 1;
  }
  return absl::OkStatus();
}

inline int64_t TopKMass(const Dataset& d, int64_t k) {
  const auto& ranked = d.ranked();
  const auto m = std::min<int64_t>(k, static_cast<int64_t>(ranked.size()));
  int64_t total = 0;
  for (int64_t i = 0; i < m; ++i) total += ranked[i];
  return total;
}

}  // namespace internal

// Fraction of item occurrences whose item is not in `s`.
inline absl::StatusOr<double> MissingMass(const Dataset& d,
                                          std::span<const ItemId> s) {
  if (absl::Status st = internal::RequireNonEmpty(d); !st.ok()) return st;
  const int64_t missing = d.total_items() - internal::CoveredMass(d, s);
  return static_cast<double>(missing) / static_cast<double>(d.total_items());
}

// l_p norm of the missing relative frequencies. p = 0 gives the number of
// missing items and p = +infinity the largest missing relative frequency.
inline absl::StatusOr<double> MissingMassP(const Dataset& d,
                                           std::span<const ItemId> s,
                                           double p) {
  if (absl::Status st = internal::RequireNonEmpty(d); !st.ok()) return st;
  if (std::isnan(p) || p < 0.0) {
    return absl::InvalidArgumentError(
        absl::StrCat("p must be in [0, inf], got ", p));
  }
  const std::vector<char> mask = internal::MembershipMask(d, s);
  const auto n = static_cast<double>(d.total_items());
  int64_t missing_count = 0;
  int64_t missing_sum = 0;
  int64_t missing_max = 0;
  for (ItemId x : d.Union()) {
    if (mask[x]) continue;
    ++missing_count;
    missing_sum += d.Frequency(x);
    missing_max = std::max(missing_max, d.Frequency(x));
  }
  if (p == 0.0) return static_cast<double>(missing_count);
  if (std::isinf(p)) return static_cast<double>(missing_max) / n;
  if (p == 1.0) return static_cast<double>(missing_sum) / n;
  if (missing_count == 0) return 0.0;
  // Normalize by the largest term before powering to avoid overflow.
  const auto top = static_cast<double>(missing_max);
  double acc = 0.0;
  for (ItemId x : d.Union()) {
    if (mask[x]) continue;
    acc += std::pow(static_cast<double>(d.Frequency(x)) / top, p);
  }
  return top * std::pow(acc, 1.0 / p) / n;
}

// (sum_{i<=k} N_(i) - sum_{x in s} N(x)) / N.
inline absl::StatusOr<double> MissingMassTopK(const Dataset& d,
                                              std::span<const ItemId> s,
                                              int64_t k) {
  if (absl::Status st = internal::RequireNonEmpty(d); !st.ok()) return st;
  if (absl::Status st = internal::ValidateSequence(d, s, k); !st.ok()) {
    return st;
  }
  int64_t released = 0;
  for (ItemId x : s) released += d.Frequency(x);
  return static_cast<double>(internal::TopKMass(d, k) - released) /
         static_cast<double>(d.total_items());
}

// Order-sensitive top-k loss in raw counts:
//   sum_{i<=min(|s|,k)} |N_(i) - N(s_i)| + sum_{i=min(|s|,k)+1}^{k} N_(i).
// Ranks beyond M contribute zero.
inline absl::StatusOr<int64_t> L1TopK(const Dataset& d,
                                      std::span<const ItemId> s, int64_t k) {
  if (absl::Status st = internal::ValidateSequence(d, s, k); !st.ok()) {
    return st;
  }
  const auto& ranked = d.ranked();
  auto rank_freq = [&](int64_t i) -> int64_t {
    return i < static_cast<int64_t>(ranked.size()) ? ranked[i] : 0;
  };
  const auto matched = std::min<int64_t>(static_cast<int64_t>(s.size()), k);
  int64_t loss = 0;
  for (int64_t i = 0; i < matched; ++i) {
    const int64_t diff = rank_freq(i) - d.Frequency(s[i]);
    loss += diff < 0 ? -diff : diff;
  }
  for (int64_t i = matched; i < k; ++i) loss += rank_freq(i);
  return loss;
}

// Number of users whose set intersects `s`.
inline int64_t Hits(const Dataset& d, std::span<const ItemId> s) {
  const std::vector<char> mask = internal::MembershipMask(d, s);
  int64_t hits = 0;
  for (const auto& user : d.users()) {
    for (ItemId x : user) {
      if (mask[x]) {
        ++hits;
        break;
      }
    }
  }
  return hits;
}

inline int64_t MissedUsers(const Dataset& d, std::span<const ItemId> s) {
  return d.num_users() - Hits(d, s);
}

struct OptResult {
  int64_t hits = 0;
  ItemSet witness;
};

inline constexpr int64_t kOptMaxItems = 22;
inline constexpr double kOptMaxSubsets = 2e6;

// Exhaustive maximum of Hits over subsets of `domain` of size
// min(k, |domain|). Hits is monotone, so this is also the maximum over all
// subsets of size <= k. The witness is the lexicographically first maximizer
// by item id.
inline absl::StatusOr<OptResult> OptBruteforce(const Dataset& d,
                                               std::span<const ItemId> domain,
                                               int64_t k) {
  if (k < 0) return absl::InvalidArgumentError("k must be non-negative");
  std::vector<ItemId> items;
  for (ItemId x : MakeItemSet({domain.begin(), domain.end()})) {
    if (d.Contains(x)) items.push_back(x);
  }
  const auto m = static_cast<int64_t>(items.size());
  const int64_t size = std::min(k, m);
  double subsets = 1.0;
  for (int64_t i = 0; i < size; ++i) {
    subsets = subsets * static_cast<double>(m - i) / static_cast<double>(i + 1);
  }
  if (m > kOptMaxItems || subsets > kOptMaxSubsets) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "oracle capacity exceeded: M = ", m, ", C(M, k) = ", subsets,
        " (limits M <= ", kOptMaxItems, ", C(M, k) <= 2e6)"));
  }
  OptResult best;
  if (size == 0) return best;

  // Per-item user coverage bitsets.
  const size_t words = (d.users().size() + 63) / 64;
  std::vector<ItemId> position(d.label_count(), UINT32_MAX);
  for (size_t j = 0; j < items.size(); ++j) position[items[j]] = j;
  std::vector<std::vector<uint64_t>> cover(items.size(),
                                           std::vector<uint64_t>(words, 0));
  for (size_t i = 0; i < d.users().size(); ++i) {
    for (ItemId x : d.user(i)) {
      if (position[x] != UINT32_MAX) {
        cover[position[x]][i / 64] |= uint64_t{1} << (i % 64);
      }
    }
  }

  std::vector<int64_t> idx(size);
  for (int64_t i = 0; i < size; ++i) idx[i] = i;
  std::vector<uint64_t> acc(words);
  best.hits = -1;
  while (true) {
    std::fill(acc.begin(), acc.end(), 0);
    for (int64_t j : idx) {
      for (size_t w = 0; w < words; ++w) acc[w] |= cover[j][w];
    }
    int64_t hits = 0;
    for (uint64_t w : acc) hits += std::popcount(w);
    if (hits > best.hits) {
      best.hits = hits;
      best.witness.clear();
      for (int64_t j : idx) best.witness.push_back(items[j]);
    }
    // Next combination in lexicographic order.
    int64_t i = size - 1;
    while (i >= 0 && idx[i] == m - size + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int64_t j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
  }
  return best;
}

inline absl::StatusOr<OptResult> OptBruteforce(const Dataset& d, int64_t k) {
  return OptBruteforce(d, d.Union(), k);
}

// Non-private greedy max-coverage over `domain`: each round takes the item
// with the largest number of not-yet-hit holders, ties by lowest id. Stops
// after k items, when the best marginal gain is zero, when every user is hit
// or when the domain is exhausted.
inline ItemSequence GreedyHits(const Dataset& d,
                               std::span<const ItemId> domain, int64_t k) {
  std::vector<ItemId> candidates;
  for (ItemId x : MakeItemSet({domain.begin(), domain.end()})) {
    if (d.Contains(x)) candidates.push_back(x);
  }
  std::vector<ItemId> position(d.label_count(), UINT32_MAX);
  for (size_t j = 0; j < candidates.size(); ++j) position[candidates[j]] = j;
  std::vector<std::vector<uint32_t>> holders(candidates.size());
  for (size_t i = 0; i < d.users().size(); ++i) {
    for (ItemId x : d.user(i)) {
      if (position[x] != UINT32_MAX) {
        holders[position[x]].push_back(static_cast<uint32_t>(i));
      }
    }
  }
  std::vector<char> hit(d.users().size(), 0);
  std::vector<char> taken(candidates.size(), 0);
  int64_t total_hit = 0;
  ItemSequence out;
  while (static_cast<int64_t>(out.size()) < k &&
         total_hit < d.num_users() && out.size() < candidates.size()) {
    int64_t best_gain = 0;
    size_t best = candidates.size();
    for (size_t j = 0; j < candidates.size(); ++j) {
      if (taken[j]) continue;
      int64_t gain = 0;
      for (uint32_t u : holders[j]) gain += hit[u] ? 0 : 1;
      if (gain > best_gain) {
        best_gain = gain;
        best = j;
      }
    }
    if (best_gain == 0) break;
    taken[best] = 1;
    for (uint32_t u : holders[best]) hit[u] = 1;
    total_hit += best_gain;
    out.push_back(candidates[best]);
  }
  return out;
}

}  // namespace dp_domain_discovery

#endif  // DP_DOMAIN_DISCOVERY_METRICS_H_
