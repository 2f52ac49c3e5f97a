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

// Turns privacy budgets into mechanism parameters: the Gaussian noise level
// and release threshold of the weighted Gaussian mechanism, the Gumbel scale
// of the peeling exponential mechanism, and the frequency level b* below
// which no sound private algorithm can reliably release an item.

#ifndef DP_DOMAIN_DISCOVERY_CALIBRATION_H_
#define DP_DOMAIN_DISCOVERY_CALIBRATION_H_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "dp_domain_discovery/dataset.h"
#include "dp_domain_discovery/status_macros.h"

namespace dp_domain_discovery {

// Relative bracket width at which SolveSigma stops.
inline constexpr double kSigmaRelativeTolerance = 1e-9;
// Absolute bracket width at which quantile bisection stops.
inline constexpr double kQuantileAbsoluteTolerance = 1e-12;

inline absl::Status ValidateEpsilonDelta(double epsilon, double delta) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be finite and positive, got ", epsilon));
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must be in (0, 1), got ", delta));
  }
  return absl::OkStatus();
}

// Total (epsilon, delta) with the fractions spent on the domain-discovery
// stage and the known-domain stage of a composed mechanism.
struct PrivacyBudget {
  double epsilon = 1.0;
  double delta = 1e-5;
  std::array<double, 2> split = {0.5, 0.5};

  absl::Status Validate() const {
    if (absl::Status s = ValidateEpsilonDelta(epsilon, delta); !s.ok()) {
      return s;
    }
    if (!(split[0] > 0.0) || !(split[1] > 0.0) ||
        std::abs(split[0] + split[1] - 1.0) > 1e-12) {
      return absl::InvalidArgumentError(absl::StrCat(
          "budget split must be two positive fractions summing to 1, got (",
          split[0], ", ", split[1], ")"));
    }
    return absl::OkStatus();
  }

  PrivacyBudget Stage(int index) const {
    return {epsilon * split[index], delta * split[index], {1.0, 0.0}};
  }
};

struct WgmConfig {
  double sigma = 1.0;
  double threshold = 1.0;
  int64_t delta0 = 1;
  // min(delta0, max_i |W_i|); zero until bound to a dataset.
  int64_t q_star = 0;

  absl::Status Validate() const {
    if (delta0 < 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("delta0 must be >= 1, got ", delta0));
    }
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
      return absl::InvalidArgumentError(
          absl::StrCat("sigma must be finite and non-negative, got ", sigma));
    }
    if (!std::isfinite(threshold)) {
      return absl::InvalidArgumentError("threshold must be finite");
    }
    return absl::OkStatus();
  }

  WgmConfig BoundTo(const Dataset& d) const {
    WgmConfig bound = *this;
    bound.q_star = std::min(delta0, d.max_user_set_size());
    return bound;
  }
};

struct GumbelScale {
  double lambda = 1.0;
  double eps0 = 1.0;
  int64_t k = 1;
};

struct CalibrationDiagnostics {
  bool used_grid_fallback = false;
  int bisection_steps = 0;
};

// Phi(x), through the complementary error function.
inline double StdNormalCdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

// Returns x >= 0 with 1 - Phi(x) = q, for q in (0, 1/2]. Working on the upper
// tail keeps full relative precision when q is tiny.
inline double StdNormalUpperQuantile(double q) {
  double lo = 0.0;
  double hi = 40.0;
  while (hi - lo > kQuantileAbsoluteTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (0.5 * std::erfc(mid / std::numbers::sqrt2) > q) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Phi^{-1}(p) by monotone bisection on the CDF.
inline absl::StatusOr<double> StdNormalQuantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("quantile argument must be in (0, 1), got ", p));
  }
  if (p == 0.5) return 0.0;
  return p < 0.5 ? -StdNormalUpperQuantile(p) : StdNormalUpperQuantile(1 - p);
}

// g(sigma) = Phi(1/(2 sigma) - eps sigma) - e^eps Phi(-1/(2 sigma) - eps sigma),
// clamped at 0. The WGM is private when g(sigma) <= delta / 2.
inline double PrivacyProfileDelta(double sigma, double epsilon) {
  const double a = 1.0 / (2.0 * sigma);
  const double b = epsilon * sigma;
  const double g =
      StdNormalCdf(a - b) - std::exp(epsilon) * StdNormalCdf(-a - b);
  return std::max(g, 0.0);
}

namespace internal {

inline double BisectSigma(double epsilon, double target, double lo, double hi,
                          CalibrationDiagnostics* diag) {
  // Invariant: g(lo) > target >= g(hi).
  while (hi - lo > kSigmaRelativeTolerance * hi) {
    const double mid = 0.5 * (lo + hi);
    if (PrivacyProfileDelta(mid, epsilon) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (diag != nullptr) ++diag->bisection_steps;
  }
  return hi;
}

}  // namespace internal

// Smallest sigma with g(sigma) <= delta / 2, to relative tolerance 1e-9. The
// returned value always satisfies the constraint.
inline absl::StatusOr<double> SolveSigma(
    double epsilon, double delta, CalibrationDiagnostics* diag = nullptr) {
  if (absl::Status s = ValidateEpsilonDelta(epsilon, delta); !s.ok()) return s;
  const double target = delta / 2.0;
  constexpr double kMinSigma = 1e-9;
  constexpr double kMaxSigma = 1e12;

  double hi = 1.0;
  while (PrivacyProfileDelta(hi, epsilon) > target && hi < kMaxSigma) hi *= 2;
  double lo = hi / 2;
  while (PrivacyProfileDelta(lo, epsilon) <= target && lo > kMinSigma) lo /= 2;
  if (PrivacyProfileDelta(hi, epsilon) <= target &&
      PrivacyProfileDelta(lo, epsilon) > target) {
    return internal::BisectSigma(epsilon, target, lo, hi, diag);
  }

  // Bracketing failed: scan a log grid for the first feasible point and
  // bisect the cell before it.
  if (diag != nullptr) diag->used_grid_fallback = true;
  constexpr int kGridPoints = 10000;
  const double log_lo = std::log(kMinSigma);
  const double log_hi = std::log(kMaxSigma);
  double previous = kMinSigma;
  for (int i = 0; i <= kGridPoints; ++i) {
    const double sigma =
        std::exp(log_lo + (log_hi - log_lo) * i / kGridPoints);
    if (PrivacyProfileDelta(sigma, epsilon) <= target) {
      if (i == 0) return sigma;
      return internal::BisectSigma(epsilon, target, previous, sigma, diag);
    }
    previous = sigma;
  }
  return absl::InternalError(absl::StrCat(
      "no sigma in [1e-9, 1e12] satisfies the privacy constraint for eps=",
      epsilon, " delta=", delta));
}

// The t-th threshold term 1/sqrt(t) + sigma * Phi^{-1}((1 - delta/2)^{1/t}).
inline double ThresholdTerm(double sigma, double delta, int64_t t) {
  const auto td = static_cast<double>(t);
  // 1 - (1 - delta/2)^{1/t}, without cancellation.
  const double tail = -std::expm1(std::log1p(-delta / 2.0) / td);
  return 1.0 / std::sqrt(td) + sigma * StdNormalUpperQuantile(tail);
}

// max(1, max_{1<=t<=delta0} ThresholdTerm(t)), evaluated at every integer t.
inline absl::StatusOr<double> SolveThreshold(double sigma, double delta,
                                             int64_t delta0) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sigma must be finite and positive, got ", sigma));
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must be in (0, 1), got ", delta));
  }
  if (delta0 < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta0 must be >= 1, got ", delta0));
  }
  double threshold = 1.0;
  for (int64_t t = 1; t <= delta0; ++t) {
    threshold = std::max(threshold, ThresholdTerm(sigma, delta, t));
  }
  return threshold;
}

// Noise and threshold for a WGM run that must satisfy (epsilon, delta)-DP.
inline absl::StatusOr<WgmConfig> CalibrateWgm(double epsilon, double delta,
                                              int64_t delta0) {
  if (delta0 < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta0 must be >= 1, got ", delta0));
  }
  WgmConfig config;
  config.delta0 = delta0;
  DPDD_ASSIGN_OR_RETURN(config.sigma, SolveSigma(epsilon, delta));
  DPDD_ASSIGN_OR_RETURN(config.threshold,
                        SolveThreshold(config.sigma, delta, delta0));
  return config;
}

// Gumbel scale lambda = 1/eps0 for k-fold peeling, where
//   eps0 = max{eps/k, sqrt((8 ln(1/delta) + 8 eps)/k) - sqrt(8 ln(1/delta)/k)}.
inline absl::StatusOr<GumbelScale> ComputeGumbelScale(double epsilon,
                                                      double delta,
                                                      int64_t k) {
  if (absl::Status s = ValidateEpsilonDelta(epsilon, delta); !s.ok()) return s;
  if (k < 1) {
    return absl::InvalidArgumentError(absl::StrCat("k must be >= 1, got ", k));
  }
  const auto kd = static_cast<double>(k);
  const double log_inv_delta = -std::log(delta);
  const double advanced = std::sqrt((8.0 * log_inv_delta + 8.0 * epsilon) / kd) -
                          std::sqrt(8.0 * log_inv_delta / kd);
  GumbelScale scale;
  scale.k = k;
  scale.eps0 = std::max(epsilon / kd, advanced);
  scale.lambda = 1.0 / scale.eps0;
  return scale;
}

// b* = (1/eps) ln(1 + (e^eps - 1) / (2 delta)).
inline absl::StatusOr<double> LowerBoundFrequency(double epsilon,
                                                  double delta) {
  if (absl::Status s = ValidateEpsilonDelta(epsilon, delta); !s.ok()) return s;
  return std::log1p(std::expm1(epsilon) / (2.0 * delta)) / epsilon;
}

}  // namespace dp_domain_discovery

#endif  // DP_DOMAIN_DISCOVERY_CALIBRATION_H_
