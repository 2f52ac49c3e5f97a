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

#include "dp_domain_discovery/calibration.h"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "absl/status/status.h"
#include "gtest/gtest.h"

namespace dp_domain_discovery {
namespace {

// Composite Simpson integration of the standard normal density on [0, x].
double CdfByIntegration(double x) {
  constexpr int kIntervals = 20000;
  const double h = x / kIntervals;
  auto pdf = [](double t) {
    return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi);
  };
  double sum = pdf(0.0) + pdf(x);
  for (int i = 1; i < kIntervals; ++i) {
    sum += (i % 2 == 1 ? 4.0 : 2.0) * pdf(i * h);
  }
  return 0.5 + sum * h / 3.0;
}

// Smallest feasible sigma located by repeated 10^4-point grid scans, each
// zooming into the cell where g first drops to delta/2.
double SigmaByGridScan(double eps, double delta) {
  double lo = 1e-3, hi = 1e4;
  for (int pass = 0; pass < 4; ++pass) {
    constexpr int kPoints = 10000;
    const double step = (hi - lo) / kPoints;
    double prev = lo;
    for (int i = 1; i <= kPoints; ++i) {
      const double sigma = lo + i * step;
      if (PrivacyProfileDelta(sigma, eps) <= delta / 2) {
        lo = prev;
        hi = sigma;
        break;
      }
      prev = sigma;
    }
  }
  return hi;
}

TEST(StdNormalTest, CdfAtZeroAndSymmetry) {
  EXPECT_EQ(StdNormalCdf(0.0), 0.5);
  EXPECT_EQ(*StdNormalQuantile(0.5), 0.0);
  for (double x = -8.0; x <= 8.0; x += 0.25) {
    EXPECT_NEAR(StdNormalCdf(x) + StdNormalCdf(-x), 1.0, 1e-12) << x;
  }
}

TEST(StdNormalTest, CdfMatchesNumericIntegration) {
  EXPECT_NEAR(StdNormalCdf(1.959964), 0.975, 1e-6);
  for (double x : {0.1, 0.5, 1.0, 1.959964, 3.0, 5.0}) {
    EXPECT_NEAR(StdNormalCdf(x), CdfByIntegration(x), 1e-12) << x;
  }
}

TEST(StdNormalTest, CdfIsMonotone) {
  double prev = 0.0;
  for (double x = -40.0; x <= 40.0; x += 0.01) {
    const double c = StdNormalCdf(x);
    EXPECT_GE(c, prev) << x;
    prev = c;
  }
}

TEST(StdNormalTest, QuantileRoundTrip) {
  for (double x = -5.0; x <= 5.0; x += 0.5) {
    EXPECT_NEAR(*StdNormalQuantile(StdNormalCdf(x)), x, 1e-9) << x;
  }
}

TEST(StdNormalTest, QuantileDomain) {
  EXPECT_EQ(StdNormalQuantile(0.0).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(StdNormalQuantile(1.0).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_FALSE(StdNormalQuantile(std::nan("")).ok());
}

TEST(StdNormalTest, QuantileTailBound) {
  // Phi^{-1}(p) <= sqrt(2 ln(1 / (1 - p))).
  for (double q : {0.4, 0.1, 1e-3, 1e-6, 1e-10}) {
    EXPECT_LE(*StdNormalQuantile(1.0 - q), std::sqrt(2.0 * std::log(1.0 / q)));
  }
}

TEST(PrivacyProfileTest, Limits) {
  EXPECT_LE(PrivacyProfileDelta(1e6, 1.0), 1e-9);
  EXPECT_NEAR(PrivacyProfileDelta(1e-6, 1.0), 1.0, 1e-12);
}

TEST(PrivacyProfileTest, NonIncreasingOnGrid) {
  for (double eps : {0.1, 1.0}) {
    double prev = PrivacyProfileDelta(0.01, eps);
    for (int j = 1; j <= 150; ++j) {
      const double g = PrivacyProfileDelta(0.01 * std::pow(1.1, j), eps);
      EXPECT_LE(g, prev) << "eps=" << eps << " j=" << j;
      prev = g;
    }
  }
}

TEST(SolveSigmaTest, TightAndMatchesGridScan) {
  for (double eps : {0.1, 1.0}) {
    for (double delta : {1e-5, 1e-6}) {
      CalibrationDiagnostics diag;
      auto sigma = SolveSigma(eps, delta, &diag);
      ASSERT_TRUE(sigma.ok());
      EXPECT_FALSE(diag.used_grid_fallback);
      EXPECT_LE(PrivacyProfileDelta(*sigma, eps), delta / 2);
      EXPECT_GT(PrivacyProfileDelta(*sigma * (1 - 1e-6), eps), delta / 2);
      const double oracle = SigmaByGridScan(eps, delta);
      EXPECT_NEAR(*sigma / oracle, 1.0, 1e-6);
      // Never above the one-term sufficient condition.
      EXPECT_LE(*sigma, *StdNormalQuantile(1 - delta / 2) / eps);
    }
  }
}

TEST(SolveSigmaTest, DecreasesWhenEpsilonDoubles) {
  for (double delta : {1e-5, 1e-6}) {
    double prev = *SolveSigma(0.05, delta);
    for (double eps : {0.1, 0.2, 0.4, 0.8, 1.6, 3.2}) {
      const double sigma = *SolveSigma(eps, delta);
      EXPECT_LT(sigma, prev);
      prev = sigma;
    }
  }
}

TEST(SolveSigmaTest, RejectsBadBudget) {
  EXPECT_FALSE(SolveSigma(0.0, 1e-5).ok());
  EXPECT_FALSE(SolveSigma(1.0, 0.0).ok());
  EXPECT_FALSE(SolveSigma(1.0, 1.0).ok());
}

TEST(SolveThresholdTest, SingleTerm) {
  const double sigma = 3.0, delta = 1e-5;
  const double expected =
      std::max(1.0, 1.0 + sigma * *StdNormalQuantile(1 - delta / 2));
  EXPECT_NEAR(*SolveThreshold(sigma, delta, 1), expected, 1e-9);
}

TEST(SolveThresholdTest, SatisfiesEveryTermAndUpperBound) {
  const double sigma = 3.0, delta = 1e-5;
  for (int64_t delta0 : {1, 100, 300}) {
    const double t_max = *SolveThreshold(sigma, delta, delta0);
    EXPECT_GE(t_max, 1.0);
    for (int64_t t = 1; t <= delta0; ++t) {
      // T >= 1/sqrt(t) + sigma z_t  <=>  1 - Phi((T - 1/sqrt(t)) / sigma)
      // <= 1 - (1 - delta/2)^{1/t}. Checked on tails with the quantile
      // tolerance folded in.
      const double z = (t_max - 1 / std::sqrt(static_cast<double>(t))) / sigma;
      const double tail = 0.5 * std::erfc(z / std::numbers::sqrt2);
      const double target = 1 - std::pow(1 - delta / 2, 1.0 / t);
      EXPECT_LE(tail, target * (1 + 1e-9)) << "t=" << t;
    }
    EXPECT_LE(t_max, 1 + sigma * std::sqrt(2 * std::log(2 * delta0 / delta)));
  }
}

TEST(SolveThresholdTest, NonDecreasingInDelta0) {
  double prev = 0;
  for (int64_t delta0 = 1; delta0 <= 300; ++delta0) {
    const double t = *SolveThreshold(3.0, 1e-5, delta0);
    EXPECT_GE(t, prev);
    prev = t;
  }
}

TEST(SolveThresholdTest, RejectsBadArguments) {
  EXPECT_FALSE(SolveThreshold(0.0, 1e-5, 1).ok());
  EXPECT_FALSE(SolveThreshold(1.0, 1e-5, 0).ok());
  EXPECT_FALSE(SolveThreshold(1.0, 1.0, 1).ok());
}

TEST(GumbelScaleTest, SmallK) {
  auto s1 = ComputeGumbelScale(1.0, 1e-5, 1);
  ASSERT_TRUE(s1.ok());
  const double l = 8 * std::log(1e5);
  EXPECT_NEAR(std::sqrt(l + 8) - std::sqrt(l), 0.41, 0.01);
  EXPECT_EQ(s1->eps0, 1.0);
  EXPECT_EQ(s1->lambda, 1.0);
  EXPECT_DOUBLE_EQ(ComputeGumbelScale(1.0, 1e-5, 3)->lambda, 3.0);
}

TEST(GumbelScaleTest, ReciprocalRelation) {
  for (int64_t k : {1, 3, 7, 49, 1000, 123457}) {
    for (double eps : {0.1, 0.5, 1.0, 4.0}) {
      GumbelScale s = *ComputeGumbelScale(eps, 1e-6, k);
      // Equal up to the rounding of a single division.
      EXPECT_DOUBLE_EQ(s.lambda * s.eps0, 1.0);
    }
  }
}

TEST(GumbelScaleTest, GrowsLikeSqrtK) {
  for (int64_t k : {10000, 40000, 160000}) {
    const double ratio = ComputeGumbelScale(1.0, 1e-5, 4 * k)->lambda /
                         ComputeGumbelScale(1.0, 1e-5, k)->lambda;
    EXPECT_NEAR(ratio, 2.0, 0.1);
  }
}

TEST(GumbelScaleTest, DecreasingInEpsilon) {
  for (int64_t k : {1, 5, 100}) {
    double prev = ComputeGumbelScale(0.01, 1e-5, k)->lambda;
    for (double eps = 0.02; eps < 10; eps *= 1.5) {
      const double lambda = ComputeGumbelScale(eps, 1e-5, k)->lambda;
      EXPECT_LT(lambda, prev);
      prev = lambda;
    }
  }
  EXPECT_FALSE(ComputeGumbelScale(1.0, 1e-5, 0).ok());
}

TEST(LowerBoundFrequencyTest, Values) {
  // Long double evaluation of the closed form as the reference.
  const long double ref = std::log(1.0L + (std::exp(1.0L) - 1.0L) / 2e-5L);
  EXPECT_NEAR(*LowerBoundFrequency(1.0, 1e-5), static_cast<double>(ref),
              1e-12);
  EXPECT_NEAR(*LowerBoundFrequency(1.0, 1e-5), 11.36, 0.005);
  // As eps -> 0 the value tends to 1 / (2 delta).
  EXPECT_NEAR(*LowerBoundFrequency(1e-6, 0.4), 1.25, 1e-5);
}

TEST(LowerBoundFrequencyTest, DecreasingInDelta) {
  double prev = *LowerBoundFrequency(1.0, 1e-9);
  for (double delta = 1e-8; delta < 0.9; delta *= 3) {
    const double b = *LowerBoundFrequency(1.0, delta);
    EXPECT_LT(b, prev);
    prev = b;
  }
}

TEST(CalibrateWgmTest, CombinesSolvers) {
  auto config = CalibrateWgm(1.0, 1e-5, 100);
  ASSERT_TRUE(config.ok());
  EXPECT_EQ(config->sigma, *SolveSigma(1.0, 1e-5));
  EXPECT_EQ(config->threshold, *SolveThreshold(config->sigma, 1e-5, 100));
  EXPECT_EQ(config->delta0, 100);
}

TEST(PrivacyBudgetTest, Validation) {
  EXPECT_TRUE(PrivacyBudget{}.Validate().ok());
  EXPECT_FALSE((PrivacyBudget{1.0, 1e-5, {0.7, 0.7}}).Validate().ok());
  EXPECT_FALSE((PrivacyBudget{1.0, 1e-5, {1.0, 0.0}}).Validate().ok());
  PrivacyBudget b{2.0, 1e-4, {0.25, 0.75}};
  EXPECT_DOUBLE_EQ(b.Stage(1).epsilon, 1.5);
  EXPECT_DOUBLE_EQ(b.Stage(0).delta, 2.5e-5);
}

}  // namespace
}  // namespace dp_domain_discovery
