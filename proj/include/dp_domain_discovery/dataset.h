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

// Per-user item-set datasets: construction, CSV ingestion, synthetic Zipfian
// generation, contribution-bounding subsampling and summary statistics.

#ifndef DP_DOMAIN_DISCOVERY_DATASET_H_
#define DP_DOMAIN_DISCOVERY_DATASET_H_

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <istream>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "dp_domain_discovery/random.h"

namespace dp_domain_discovery {

// Dense interned item identifier. Ids index the dataset's string table.
using ItemId = uint32_t;

// Sorted, duplicate-free collection of item ids.
using ItemSet = std::vector<ItemId>;

// Ordered output of a top-k style mechanism. Distinct ids, order matters.
using ItemSequence = std::vector<ItemId>;

inline ItemSet MakeItemSet(std::vector<ItemId> items) {
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  return items;
}

// Rank-frequency bound parameters: N_(r) / N <= c / r^s.
struct ZipfParams {
  double c = 1.0;
  double s = 1.0;

  absl::Status Validate() const {
    if (!(c >= 1.0) || !std::isfinite(c)) {
      return absl::InvalidArgumentError(
          absl::StrCat("Zipf constant C must be finite and >= 1, got ", c));
    }
    if (!(s >= 0.0) || !std::isfinite(s)) {
      return absl::InvalidArgumentError(
          absl::StrCat("Zipf exponent s must be finite and >= 0, got ", s));
    }
    return absl::OkStatus();
  }
};

struct ZipfCheckResult {
  bool ok = true;
  // 1-based rank of the first violation; 0 when `ok`.
  int64_t first_violating_rank = 0;
};

struct DatasetStats {
  int64_t n_users = 0;
  int64_t n_items = 0;    // M
  int64_t n_entries = 0;  // N
  int64_t max_user_set_size = 0;
  // (set size, fraction of users with at most that many items).
  std::vector<std::pair<int64_t, double>> ecdf;
  // (rank, frequency), rank starting at 1.
  std::vector<std::pair<int64_t, int64_t>> rank_freq;
};

struct IngestOptions {
  bool has_header = false;
};

struct IngestDiagnostics {
  int64_t rows = 0;
  int64_t duplicates_collapsed = 0;
};

// Immutable collection of per-user item sets plus the cached frequency
// table. Copies are cheap for the label tables, which are shared.
class Dataset {
 public:
  struct ItemTable {
    std::vector<std::string> labels;
    std::unordered_map<std::string, ItemId> index;
  };

  Dataset()
      : Dataset(std::make_shared<const ItemTable>(),
                std::make_shared<const std::vector<std::string>>(), {}) {}

  // `users[i]` holds ids into `items`; each user's list is sorted and
  // deduplicated here. `user_labels` must have one entry per user.
  Dataset(std::shared_ptr<const ItemTable> items,
          std::shared_ptr<const std::vector<std::string>> user_labels,
          std::vector<std::vector<ItemId>> users)
      : items_(std::move(items)),
        user_labels_(std::move(user_labels)),
        users_(std::move(users)) {
    assert(user_labels_->size() == users_.size());
    freq_.assign(items_->labels.size(), 0);
    for (auto& user : users_) {
      std::sort(user.begin(), user.end());
      user.erase(std::unique(user.begin(), user.end()), user.end());
      for (ItemId x : user) {
        assert(x < freq_.size());
        ++freq_[x];
      }
      total_ += static_cast<int64_t>(user.size());
      max_user_set_size_ =
          std::max(max_user_set_size_, static_cast<int64_t>(user.size()));
    }
    for (ItemId x = 0; x < freq_.size(); ++x) {
      if (freq_[x] > 0) items_by_rank_.push_back(x);
    }
    union_ = items_by_rank_;
    std::stable_sort(items_by_rank_.begin(), items_by_rank_.end(),
                     [this](ItemId a, ItemId b) { return freq_[a] > freq_[b]; });
    ranked_.reserve(items_by_rank_.size());
    for (ItemId x : items_by_rank_) ranked_.push_back(freq_[x]);
  }

  // Builds a dataset from labelled item sets. Users are labelled "u1", "u2",
  // ...; items are interned in first-appearance order.
  static Dataset FromItemSets(
      const std::vector<std::vector<std::string>>& user_items) {
    auto table = std::make_shared<ItemTable>();
    auto user_labels = std::make_shared<std::vector<std::string>>();
    std::vector<std::vector<ItemId>> users;
    users.reserve(user_items.size());
    for (size_t i = 0; i < user_items.size(); ++i) {
      user_labels->push_back(absl::StrCat("u", i + 1));
      std::vector<ItemId> ids;
      for (const std::string& label : user_items[i]) {
        ids.push_back(Intern(*table, label));
      }
      users.push_back(std::move(ids));
    }
    return Dataset(std::move(table), std::move(user_labels), std::move(users));
  }

  // Returns the id for `label`, adding it to `table` if new.
  static ItemId Intern(ItemTable& table, std::string_view label) {
    auto it = table.index.find(std::string(label));
    if (it != table.index.end()) return it->second;
    const auto id = static_cast<ItemId>(table.labels.size());
    table.labels.emplace_back(label);
    table.index.emplace(std::string(label), id);
    return id;
  }

  // A dataset over the same label tables with different per-user sets.
  Dataset WithUsers(std::vector<std::vector<ItemId>> users) const {
    return Dataset(items_, user_labels_, std::move(users));
  }

  int64_t num_users() const { return static_cast<int64_t>(users_.size()); }
  // N: sum of set sizes.
  int64_t total_items() const { return total_; }
  // M: size of the union.
  int64_t unique_items() const {
    return static_cast<int64_t>(union_.size());
  }
  bool empty() const { return total_ == 0; }

  // N(x); zero for ids outside the union (including unknown ids).
  int64_t Frequency(ItemId x) const {
    return x < freq_.size() ? freq_[x] : 0;
  }
  bool Contains(ItemId x) const { return Frequency(x) > 0; }

  std::span<const ItemId> user(size_t i) const { return users_[i]; }
  const std::vector<std::vector<ItemId>>& users() const { return users_; }
  int64_t max_user_set_size() const { return max_user_set_size_; }

  // N_(1) >= N_(2) >= ... >= N_(M).
  const std::vector<int64_t>& ranked() const { return ranked_; }
  // Items of the union ordered by frequency, ties by id.
  const ItemSequence& items_by_rank() const { return items_by_rank_; }
  // The union of all user sets, sorted by id.
  const ItemSet& Union() const { return union_; }

  // Size of the string table; ids are < label_count().
  size_t label_count() const { return items_->labels.size(); }
  const std::string& item_label(ItemId x) const { return items_->labels[x]; }
  std::optional<ItemId> FindItem(std::string_view label) const {
    auto it = items_->index.find(std::string(label));
    if (it == items_->index.end()) return std::nullopt;
    return it->second;
  }
  const std::string& user_label(size_t i) const { return (*user_labels_)[i]; }

  const std::shared_ptr<const ItemTable>& item_table() const { return items_; }

  // Content equality over labels: same users in the same order holding the
  // same labelled item sets.
  friend bool operator==(const Dataset& a, const Dataset& b) {
    if (a.users_.size() != b.users_.size()) return false;
    if (*a.user_labels_ != *b.user_labels_) return false;
    if (a.items_ == b.items_) return a.users_ == b.users_;
    std::vector<std::string_view> la, lb;
    for (size_t i = 0; i < a.users_.size(); ++i) {
      if (a.users_[i].size() != b.users_[i].size()) return false;
      la.clear();
      lb.clear();
      for (ItemId x : a.users_[i]) la.push_back(a.item_label(x));
      for (ItemId x : b.users_[i]) lb.push_back(b.item_label(x));
      std::sort(la.begin(), la.end());
      std::sort(lb.begin(), lb.end());
      if (la != lb) return false;
    }
    return true;
  }

 private:
  std::shared_ptr<const ItemTable> items_;
  std::shared_ptr<const std::vector<std::string>> user_labels_;
  std::vector<std::vector<ItemId>> users_;
  std::vector<int64_t> freq_;
  std::vector<int64_t> ranked_;
  ItemSequence items_by_rank_;
  ItemSet union_;
  int64_t total_ = 0;
  int64_t max_user_set_size_ = 0;
};

// Reads "user_id,item_id" rows. Blank lines are skipped and a trailing '\r'
// is stripped. Rows are grouped by user in first-appearance order and
// repeated (user, item) rows are collapsed.
inline absl::StatusOr<Dataset> IngestPairs(
    std::istream& in, const IngestOptions& options = {},
    IngestDiagnostics* diagnostics = nullptr) {
  auto table = std::make_shared<Dataset::ItemTable>();
  auto user_labels = std::make_shared<std::vector<std::string>>();
  std::unordered_map<std::string, size_t> user_index;
  std::vector<std::vector<ItemId>> users;
  IngestDiagnostics diag;

  std::string line;
  int64_t line_number = 0;
  bool header_pending = options.has_header;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const size_t comma = line.find(',');
    if (comma == std::string::npos ||
        line.find(',', comma + 1) != std::string::npos) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", line_number, ": expected exactly two comma-separated "
          "fields \"user_id,item_id\""));
    }
    std::string_view user(line.data(), comma);
    std::string_view item(line.data() + comma + 1, line.size() - comma - 1);
    if (user.empty() || item.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_number, ": empty field"));
    }
    auto [it, inserted] =
        user_index.try_emplace(std::string(user), users.size());
    if (inserted) {
      user_labels->emplace_back(user);
      users.emplace_back();
    }
    users[it->second].push_back(Dataset::Intern(*table, item));
    ++diag.rows;
  }
  if (diag.rows == 0) {
    return absl::FailedPreconditionError("empty dataset: no user,item rows");
  }
  Dataset dataset(std::move(table), std::move(user_labels), std::move(users));
  diag.duplicates_collapsed = diag.rows - dataset.total_items();
  if (diagnostics != nullptr) *diagnostics = diag;
  return dataset;
}

// Writes one "user_id,item_id" row per entry, users in dataset order and
// items by id within a user.
inline void WritePairs(const Dataset& d, std::ostream& out,
                       bool header = false) {
  if (header) out << "user_id,item_id\n";
  for (size_t i = 0; i < d.users().size(); ++i) {
    for (ItemId x : d.user(i)) {
      out << d.user_label(i) << ',' << d.item_label(x) << '\n';
    }
  }
}

// Checks N_(r) / N <= C / r^s for every rank, as N_(r) * r^s <= C * N up to
// a relative tolerance of 1e-12 so that exact equality is accepted.
inline ZipfCheckResult ZipfCheck(const Dataset& d, const ZipfParams& params) {
  constexpr double kRelTol = 1e-12;
  const double bound =
      params.c * static_cast<double>(d.total_items()) * (1.0 + kRelTol);
  const auto& ranked = d.ranked();
  for (size_t r = 1; r <= ranked.size(); ++r) {
    const double lhs = static_cast<double>(ranked[r - 1]) *
                       std::pow(static_cast<double>(r), params.s);
    if (lhs > bound) return {false, static_cast<int64_t>(r)};
  }
  return {true, 0};
}

// Synthetic dataset whose rank-r item is held by max(1, round(n * r^-s))
// distinct users chosen uniformly at random. Users are labelled "u1".."un"
// and items "x1".."x<n_items>" in rank order. Fails if the result does not
// satisfy the (C, s) bound.
inline absl::StatusOr<Dataset> GenerateZipf(const ZipfParams& params,
                                            int64_t n_items, int64_t n,
                                            uint64_t seed) {
  if (absl::Status s = params.Validate(); !s.ok()) return s;
  if (!(params.s > 0.0)) {
    return absl::InvalidArgumentError("Zipf generation requires s > 0");
  }
  if (n_items < 1 || n < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("need n_items >= 1 and n >= 1, got n_items=", n_items,
                     " n=", n));
  }
  auto table = std::make_shared<Dataset::ItemTable>();
  table->labels.reserve(n_items);
  for (int64_t r = 1; r <= n_items; ++r) {
    Dataset::Intern(*table, absl::StrCat("x", r));
  }
  auto user_labels = std::make_shared<std::vector<std::string>>();
  user_labels->reserve(n);
  for (int64_t i = 1; i <= n; ++i) user_labels->push_back(absl::StrCat("u", i));

  Rng rng(seed);
  std::vector<uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  std::vector<std::vector<ItemId>> users(n);
  for (int64_t r = 1; r <= n_items; ++r) {
    const double target =
        static_cast<double>(n) * std::pow(static_cast<double>(r), -params.s);
    const int64_t f = std::max<int64_t>(1, std::llround(target));
    // Partial Fisher-Yates: the first f slots become a uniform f-subset.
    for (int64_t j = 0; j < f; ++j) {
      const auto pick = j + static_cast<int64_t>(rng.UniformInt(n - j));
      std::swap(perm[j], perm[pick]);
      users[perm[j]].push_back(static_cast<ItemId>(r - 1));
    }
  }
  Dataset dataset(std::move(table), std::move(user_labels), std::move(users));
  const ZipfCheckResult check = ZipfCheck(dataset, params);
  if (!check.ok) {
    return absl::FailedPreconditionError(absl::StrCat(
        "generated frequencies violate the (C=", params.c, ", s=", params.s,
        ") Zipf bound at rank ", check.first_violating_rank,
        "; increase n or decrease n_items"));
  }
  return dataset;
}

// Keeps a uniformly random subset of min(delta0, |W_i|) items of every user.
// User i draws from its own substream DeriveSeed(seed, i).
inline Dataset Subsample(const Dataset& d, int64_t delta0, uint64_t seed) {
  assert(delta0 >= 1);
  const auto limit = static_cast<size_t>(std::max<int64_t>(delta0, 1));
  std::vector<std::vector<ItemId>> kept;
  kept.reserve(d.users().size());
  for (size_t i = 0; i < d.users().size(); ++i) {
    std::span<const ItemId> items = d.user(i);
    if (items.size() <= limit) {
      kept.emplace_back(items.begin(), items.end());
      continue;
    }
    std::vector<ItemId> pool(items.begin(), items.end());
    Rng rng(DeriveSeed(seed, i));
    for (size_t j = 0; j < limit; ++j) {
      const size_t pick = j + rng.UniformInt(pool.size() - j);
      std::swap(pool[j], pool[pick]);
    }
    pool.resize(limit);
    kept.push_back(std::move(pool));
  }
  return d.WithUsers(std::move(kept));
}

inline DatasetStats ComputeStats(const Dataset& d) {
  DatasetStats stats;
  stats.n_users = d.num_users();
  stats.n_items = d.unique_items();
  stats.n_entries = d.total_items();
  stats.max_user_set_size = d.max_user_set_size();
  if (d.num_users() > 0) {
    std::vector<int64_t> count_by_size(d.max_user_set_size() + 1, 0);
    for (const auto& user : d.users()) ++count_by_size[user.size()];
    int64_t cumulative = 0;
    for (size_t size = 0; size < count_by_size.size(); ++size) {
      if (count_by_size[size] == 0) continue;
      cumulative += count_by_size[size];
      stats.ecdf.emplace_back(static_cast<int64_t>(size),
                              static_cast<double>(cumulative) /
                                  static_cast<double>(d.num_users()));
    }
  }
  const auto& ranked = d.ranked();
  stats.rank_freq.reserve(ranked.size());
  for (size_t r = 0; r < ranked.size(); ++r) {
    stats.rank_freq.emplace_back(static_cast<int64_t>(r + 1), ranked[r]);
  }
  return stats;
}

// n users, each holding its own unique item.
inline Dataset HardInstanceSingleton(int64_t n) {
  assert(n >= 1);
  std::vector<std::vector<std::string>> sets;
  sets.reserve(n);
  for (int64_t i = 1; i <= n; ++i) sets.push_back({absl::StrCat("x", i)});
  return Dataset::FromItemSets(sets);
}

// k items, item j held by its own disjoint block of b users.
inline Dataset HardInstanceFlat(int64_t k, int64_t b) {
  assert(k >= 1 && b >= 1);
  std::vector<std::vector<std::string>> sets;
  sets.reserve(k * b);
  for (int64_t j = 1; j <= k; ++j) {
    for (int64_t u = 0; u < b; ++u) sets.push_back({absl::StrCat("x", j)});
  }
  return Dataset::FromItemSets(sets);
}

}  // namespace dp_domain_discovery

#endif  // DP_DOMAIN_DISCOVERY_DATASET_H_
