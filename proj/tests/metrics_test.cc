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

#include "dp_domain_discovery/metrics.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace dp_domain_discovery {
namespace {

using ::dp_domain_discovery::testing::Ids;
using ::dp_domain_discovery::testing::RandomDataset;

constexpr double kInf = std::numeric_limits<double>::infinity();

// {u1: {a, b}, u2: {a}}
Dataset Small() { return Dataset::FromItemSets({{"a", "b"}, {"a"}}); }

// Subset of `items` selected by the bits of `mask`.
std::vector<ItemId> SubsetOf(const std::vector<ItemId>& items, uint32_t mask) {
  std::vector<ItemId> out;
  for (size_t j = 0; j < items.size(); ++j) {
    if (mask >> j & 1u) out.push_back(items[j]);
  }
  return out;
}

// Direct per-user scan; shares no code with Hits.
int64_t HitsOracle(const Dataset& d, const std::vector<ItemId>& s) {
  int64_t hits = 0;
  for (size_t i = 0; i < d.users().size(); ++i) {
    bool hit = false;
    for (ItemId x : s) {
      for (ItemId y : d.user(i)) hit |= x == y;
    }
    hits += hit;
  }
  return hits;
}

TEST(MissingMassTest, Examples) {
  Dataset d = Small();
  EXPECT_EQ(*MissingMass(d, {}), 1.0);
  EXPECT_EQ(*MissingMass(d, d.Union()), 0.0);
  EXPECT_DOUBLE_EQ(*MissingMass(d, Ids(d, {"a"})), 1.0 / 3.0);
}

TEST(MissingMassTest, UnknownItemsAreIgnored) {
  Dataset d = Small();
  std::vector<ItemId> s = {*d.FindItem("a"), 99};
  EXPECT_DOUBLE_EQ(*MissingMass(d, s), 1.0 / 3.0);
}

TEST(MissingMassTest, EmptyDatasetIsUndefined) {
  EXPECT_EQ(MissingMass(Dataset(), {}).status().code(),
            absl::StatusCode::kFailedPrecondition);
  EXPECT_FALSE(MissingMassP(Dataset(), {}, 2.0).ok());
}

TEST(MissingMassPTest, Examples) {
  Dataset d = Small();
  EXPECT_DOUBLE_EQ(*MissingMassP(d, Ids(d, {"b"}), kInf), 2.0 / 3.0);
  EXPECT_EQ(*MissingMassP(d, {}, 0.0), 2.0);
  // l2 of (2/3, 1/3).
  EXPECT_DOUBLE_EQ(*MissingMassP(d, {}, 2.0), std::sqrt(5.0) / 3.0);
  EXPECT_FALSE(MissingMassP(d, {}, -1.0).ok());
  EXPECT_FALSE(MissingMassP(d, {}, std::nan("")).ok());
}

TEST(MissingMassPTest, NormRelations) {
  Rng rng(21);
  for (int rep = 0; rep < 100; ++rep) {
    Dataset d = RandomDataset(rng, 8, 10, 0.3);
    std::vector<ItemId> s;
    for (ItemId x : d.Union()) {
      if (rng.UniformOpen() < 0.4) s.push_back(x);
    }
    const double mm = *MissingMass(d, s);
    EXPECT_EQ(*MissingMassP(d, s, 1.0), mm);
    const double mm_inf = *MissingMassP(d, s, kInf);
    EXPECT_LE(mm_inf, mm + 1e-15);
    EXPECT_LE(mm, d.unique_items() * mm_inf + 1e-15);
  }
}

TEST(MissingMassTest, MonotoneUnderAddition) {
  Rng rng(22);
  for (int rep = 0; rep < 50; ++rep) {
    Dataset d = RandomDataset(rng, 8, 10, 0.3);
    std::vector<ItemId> s;
    double prev_mm = 1.0, prev_mm2 = *MissingMassP(d, {}, 2.0);
    int64_t prev_hits = 0;
    for (ItemId x : d.Union()) {
      s.push_back(x);
      const double mm = *MissingMass(d, s);
      const double mm2 = *MissingMassP(d, s, 2.0);
      const int64_t hits = Hits(d, s);
      EXPECT_LE(mm, prev_mm);
      EXPECT_LE(mm2, prev_mm2 + 1e-15);
      EXPECT_GE(hits, prev_hits);
      prev_mm = mm;
      prev_mm2 = mm2;
      prev_hits = hits;
    }
  }
}

TEST(MissingMassTopKTest, Examples) {
  Dataset d = Small();
  EXPECT_EQ(*MissingMassTopK(d, d.items_by_rank(), 2), 0.0);
  EXPECT_DOUBLE_EQ(*MissingMassTopK(d, Ids(d, {"b"}), 1), 1.0 / 3.0);
  EXPECT_EQ(*MissingMassTopK(d, {}, d.unique_items()), 1.0);
}

TEST(MissingMassTopKTest, ContractErrors) {
  Dataset d = Small();
  EXPECT_FALSE(MissingMassTopK(d, Ids(d, {"a", "b"}), 1).ok());
  EXPECT_FALSE(MissingMassTopK(d, Ids(d, {"a", "a"}), 2).ok());
  std::vector<ItemId> unknown = {42};
  EXPECT_FALSE(MissingMassTopK(d, unknown, 2).ok());
  EXPECT_FALSE(L1TopK(d, Ids(d, {"a", "b"}), 1).ok());
}

TEST(MissingMassTopKTest, EqualsMissingMassAtFullK) {
  Rng rng(23);
  for (int rep = 0; rep < 50; ++rep) {
    Dataset d = RandomDataset(rng, 10, 8, 0.3);
    std::vector<ItemId> s;
    for (ItemId x : d.Union()) {
      if (rng.UniformOpen() < 0.5) s.push_back(x);
    }
    EXPECT_DOUBLE_EQ(*MissingMassTopK(d, s, d.unique_items()),
                     *MissingMass(d, s));
  }
}

TEST(L1TopKTest, Examples) {
  Dataset d = Small();
  EXPECT_EQ(*L1TopK(d, d.items_by_rank(), 2), 0);
  EXPECT_EQ(*L1TopK(d, Ids(d, {"b", "a"}), 2), 2);
  EXPECT_EQ(*L1TopK(d, {}, 2), 3);
  EXPECT_EQ(*L1TopK(d, Ids(d, {"b"}), 2), 1 + 1);
}

TEST(HitsTest, Examples) {
  Dataset d = Small();
  EXPECT_EQ(Hits(d, Ids(d, {"a"})), 2);
  EXPECT_EQ(Hits(d, {}), 0);
  EXPECT_EQ(Hits(d, d.Union()), 2);
  EXPECT_EQ(MissedUsers(d, Ids(d, {"b"})), 1);
}

TEST(HitsTest, MatchesScanOracle) {
  Rng rng(24);
  for (int rep = 0; rep < 100; ++rep) {
    Dataset d = RandomDataset(rng, 15, 10, 0.2);
    std::vector<ItemId> s;
    for (ItemId x : d.Union()) {
      if (rng.UniformOpen() < 0.3) s.push_back(x);
    }
    EXPECT_EQ(Hits(d, s), HitsOracle(d, s));
    EXPECT_EQ(Hits(d, s) + MissedUsers(d, s), d.num_users());
  }
}

TEST(OptBruteforceTest, Examples) {
  Dataset flat = HardInstanceFlat(2, 3);
  EXPECT_EQ(OptBruteforce(flat, 2)->hits, 6);

  Dataset d = Dataset::FromItemSets({{"a", "b"}, {"a"}, {"c"}});
  auto opt = OptBruteforce(d, 1);
  ASSERT_TRUE(opt.ok());
  EXPECT_EQ(opt->hits, 2);
  EXPECT_EQ(opt->witness, Ids(d, {"a"}));

  EXPECT_EQ(OptBruteforce(d, 10)->hits, Hits(d, d.Union()));
}

TEST(OptBruteforceTest, MatchesPowerSetScan) {
  Rng rng(25);
  for (int rep = 0; rep < 40; ++rep) {
    Dataset d = RandomDataset(rng, 12, 9, 0.15);
    const std::vector<ItemId>& items = d.Union();
    for (int64_t k = 1; k <= 3; ++k) {
      int64_t best = 0;
      for (uint32_t mask = 0; mask < (1u << items.size()); ++mask) {
        if (std::popcount(mask) > k) continue;
        best = std::max(best, HitsOracle(d, SubsetOf(items, mask)));
      }
      auto opt = OptBruteforce(d, k);
      ASSERT_TRUE(opt.ok());
      EXPECT_EQ(opt->hits, best);
      EXPECT_EQ(Hits(d, opt->witness), best);
    }
  }
}

TEST(OptBruteforceTest, CapacityGuard) {
  std::vector<std::vector<std::string>> sets;
  for (int x = 0; x < 23; ++x) sets.push_back({"i" + std::to_string(x)});
  EXPECT_EQ(OptBruteforce(Dataset::FromItemSets(sets), 2).status().code(),
            absl::StatusCode::kResourceExhausted);
  sets.pop_back();
  // C(22, 11) = 705432 fits; C(22, 11) at M = 22 is the largest.
  EXPECT_TRUE(OptBruteforce(Dataset::FromItemSets(sets), 2).ok());
}

TEST(OptBruteforceTest, DomainRestrictionBound) {
  Rng rng(26);
  for (int rep = 0; rep < 30; ++rep) {
    Dataset d = RandomDataset(rng, 20, 10, 0.2);
    for (int64_t tau : {1, 2, 3, 4}) {
      std::vector<ItemId> domain;
      for (ItemId x : d.Union()) {
        if (d.Frequency(x) >= tau) domain.push_back(x);
      }
      for (int64_t k = 1; k <= 3; ++k) {
        const int64_t full = OptBruteforce(d, k)->hits;
        const int64_t restricted = OptBruteforce(d, domain, k)->hits;
        EXPECT_GE(restricted, full - k * tau);
      }
    }
  }
}

TEST(GreedyHitsTest, Examples) {
  Dataset d = Dataset::FromItemSets({{"a"}, {"a"}, {"b"}});
  EXPECT_EQ(GreedyHits(d, d.Union(), 1), Ids(d, {"a"}));
  // Stops once no gain remains.
  Dataset e = Dataset::FromItemSets({{"a", "b"}, {"a"}});
  EXPECT_EQ(GreedyHits(e, e.Union(), 2), Ids(e, {"a"}));
}

TEST(GreedyHitsTest, ApproximationGuarantee) {
  Rng rng(27);
  for (int rep = 0; rep < 100; ++rep) {
    Dataset d = RandomDataset(rng, 15, 15, 0.12);
    for (int64_t k = 1; k <= 3; ++k) {
      const ItemSequence g = GreedyHits(d, d.Union(), k);
      EXPECT_LE(static_cast<int64_t>(g.size()), k);
      EXPECT_GE(static_cast<double>(Hits(d, g)),
                (1.0 - 1.0 / std::exp(1.0)) * OptBruteforce(d, k)->hits);
    }
  }
}

TEST(MetricReportTest, CsvRow) {
  MetricReport report{MetricName::kMissingMassP, 0.25, {{"p", 2.0}}};
  EXPECT_EQ(report.ToCsvRow(), "MM_p,\"{\"\"p\"\":2.0}\",0.25");
}

}  // namespace
}  // namespace dp_domain_discovery
