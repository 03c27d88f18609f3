/*
 * Copyright 2026 The tempcal Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef TEMPCAL_RANDOM_H_
#define TEMPCAL_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace tempcal {

// Named stream identifiers. Every consumer of randomness draws from its own
// stream so that adding draws in one place never perturbs another.
enum class Stream : std::uint64_t {
  kLogits = 1,
  kLabels = 2,
  kPriorPilot = 3,
  kLabelFlip = 5,
  kPartition = 6,
  kRepetition = 7,
  kSubsample = 8,
  kTargetDomain = 9,
};

std::uint64_t splitmix64(std::uint64_t x);

// Stream seed = splitmix64(splitmix64(seed) ^ (stream * golden-ratio constant)).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);
inline std::uint64_t derive_seed(std::uint64_t seed, Stream stream) {
  return derive_seed(seed, static_cast<std::uint64_t>(stream));
}

// Portable generator: mt19937_64 has a standardized output sequence, and all
// distributions below are implemented here so results do not depend on the
// standard library vendor.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, Stream stream) : engine_(derive_seed(seed, stream)) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal();
  // Uniform integer in [0, n), unbiased (rejection sampling). n > 0.
  std::size_t uniform_index(std::size_t n);
  // Inverse-CDF draw from unnormalized non-negative weights.
  std::size_t categorical(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Fisher-Yates permutation of [0, n).
std::vector<std::size_t> permutation(std::size_t n, Rng& rng);

}  // namespace tempcal

#endif  // TEMPCAL_RANDOM_H_
