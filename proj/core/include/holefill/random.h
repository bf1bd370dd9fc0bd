// Copyright 2026 The Holefill Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Seeded randomness with a fixed cross-platform output sequence.
//
// std::mt19937_64 is fully specified by the standard, but the standard
// distributions and std::shuffle are not. The helpers here are written out so
// that a given seed yields the same holes and prompts on every toolchain.

#ifndef HOLEFILL_RANDOM_H_
#define HOLEFILL_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace holefill {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t Below(std::uint64_t bound);
  // Uniform double in [0, 1) with 53 random bits.
  double Unit();

  // Picks `count` distinct positions from [0, n) by a partial Fisher-Yates
  // shuffle and returns them in draw order. count must be <= n.
  std::vector<std::size_t> SampleIndices(std::size_t n, std::size_t count);

 private:
  std::mt19937_64 engine_;
};

// 64-bit finalizer from SplitMix64.
std::uint64_t Mix64(std::uint64_t x);

// FNV-1a over the bytes of `s`.
std::uint64_t HashString(std::string_view s);

// Seed for a (topic, passage) pair, independent of iteration order.
std::uint64_t PairSeed(std::uint64_t base_seed, std::string_view topic_id,
                       std::string_view passage_id);

}  // namespace holefill

#endif  // HOLEFILL_RANDOM_H_
