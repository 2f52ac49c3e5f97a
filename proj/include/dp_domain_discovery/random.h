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

// Seeded randomness used by every mechanism. All draws go through a 64-bit
// Mersenne Twister and hand-written transforms, so a (seed, stream) pair
// produces the same numbers on every platform and standard library.

#ifndef DP_DOMAIN_DISCOVERY_RANDOM_H_
#define DP_DOMAIN_DISCOVERY_RANDOM_H_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace dp_domain_discovery {

// Finalizer from SplitMix64. Bijective on 64-bit words.
inline uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives the seed of an independent substream. Used for per-user,
// per-stage and per-trial streams so results do not depend on scheduling.
inline uint64_t DeriveSeed(uint64_t seed, uint64_t stream) {
  return SplitMix64(SplitMix64(seed) ^ SplitMix64(~stream));
}

// Well-known stream indices for composed mechanisms.
inline constexpr uint64_t kSubsampleStream = 1;
inline constexpr uint64_t kGaussianNoiseStream = 2;
inline constexpr uint64_t kWgmStageStream = 3;
inline constexpr uint64_t kSelectionStageStream = 4;
inline constexpr uint64_t kDataStream = 5;

class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }

  // Uniform on the open interval (0, 1): 53 random bits centred in their cell.
  double UniformOpen() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound) by rejection, bound >= 1.
  uint64_t UniformInt(uint64_t bound) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  // Standard normal via Box-Muller; one output per call.
  double StandardGaussian() {
    const double u1 = UniformOpen();
    const double u2 = UniformOpen();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  double Gaussian(double stddev) { return stddev * StandardGaussian(); }

  // Gumbel with location 0 and scale `lambda`, by inverse CDF.
  double Gumbel(double lambda) {
    return -lambda * std::log(-std::log(UniformOpen()));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dp_domain_discovery

#endif  // DP_DOMAIN_DISCOVERY_RANDOM_H_
