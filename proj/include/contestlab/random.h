// Copyright 2026 The ContestLab Authors
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

#ifndef CONTESTLAB_RANDOM_H_
#define CONTESTLAB_RANDOM_H_

#include <cstdint>
#include <random>

namespace contestlab {

// All stochastic code takes an explicit generator. The helpers below are
// used instead of the std distributions.
using Rng = std::mt19937_64;

// Uniform on [0, 1) with 53 random bits.
inline double Uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool FairCoin(Rng& rng) { return (rng() >> 63) != 0; }

inline bool Bernoulli(Rng& rng, double p) { return Uniform01(rng) < p; }

// Uniform integer in [0, n) by rejection; n > 0.
inline std::uint64_t UniformIndex(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

// Seeds an independent substream from a parent seed and a stream index
// (splitmix64 finalizer).
inline std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Fisher-Yates with UniformIndex.
template <typename T>
void Shuffle(T& container, Rng& rng) {
  for (std::size_t i = container.size(); i > 1; --i) {
    std::size_t j = UniformIndex(rng, i);
    using std::swap;
    swap(container[i - 1], container[j]);
  }
}

}  // namespace contestlab

#endif  // CONTESTLAB_RANDOM_H_
