//
// Copyright 2026 The dpadapt Authors
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

// Seedable, splittable random streams. A stream is identified by a 64-bit key;
// Split(k) derives a child keyed by (parent key, k) without touching the
// parent's state, so substreams are reproducible regardless of how much the
// parent has already been consumed or in which order children are created.

#ifndef DPADAPT_RNG_H_
#define DPADAPT_RNG_H_

#include <array>
#include <cstdint>
#include <limits>

namespace dpadapt {

// SplitMix64 finalizer; also used to expand keys into generator state.
constexpr std::uint64_t Mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256** with SplitMix64 seeding. Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  // Child stream keyed by (key(), index).
  Rng Split(std::uint64_t index) const;

  std::uint64_t key() const { return key_; }

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double Uniform();

  // Standard normal via the Marsaglia polar method (no cached spare, so each
  // call consumes an independent pair).
  double Normal();

  // Laplace(0, 1) via inverse CDF.
  double Laplace();

 private:
  std::uint64_t key_;
  std::array<std::uint64_t, 4> state_;
};

}  // namespace dpadapt

#endif  // DPADAPT_RNG_H_
