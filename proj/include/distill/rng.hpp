// include/distill/rng.hpp

// Copyright 2026  The distill-nmt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DISTILL_RNG_HPP_
#define DISTILL_RNG_HPP_

#include <cstdint>
#include <random>

namespace distill {

// Integer/real conversions are written out here instead of using the
// <random> distributions, whose output is implementation-defined. Every
// seeded artifact must come out the same on any standard library.

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Counter-based generator: output i is a pure function of (key, i).
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) : key_(key) {}
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix64(seed) ^ mix64(stream ^ 0xD1B54A32D192ED03ULL)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() { return mix64(key_ ^ mix64(counter_++)); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Uniform integer in [0, bound) by rejection; bound must be > 0.
template <typename Gen>
std::uint64_t uniform_below(Gen& gen, std::uint64_t bound) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  for (;;) {
    const std::uint64_t x = static_cast<std::uint64_t>(gen());
    if (x < limit) return x % bound;
  }
}

/// Uniform real strictly inside (0, 1).
template <typename Gen>
double uniform_open01(Gen& gen) {
  const std::uint64_t x = static_cast<std::uint64_t>(gen()) >> 11;
  return (static_cast<double>(x) + 0.5) * 0x1.0p-53;
}

}  // namespace distill

#endif  // DISTILL_RNG_HPP_
