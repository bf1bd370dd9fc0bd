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

#include "holefill/random.h"

#include <numeric>

#include "holefill/errors.h"

namespace holefill {

std::uint64_t Rng::Below(std::uint64_t bound) {
  if (bound == 0) throw InvalidArgument("Rng::Below requires a positive bound");
  // Rejection keeps the result unbiased; the threshold is 2^64 mod bound.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    std::uint64_t x = engine_();
    if (x >= threshold) return x % bound;
  }
}

double Rng::Unit() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::vector<std::size_t> Rng::SampleIndices(std::size_t n, std::size_t count) {
  if (count > n) throw InvalidArgument("cannot sample more items than exist");
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t j = i + static_cast<std::size_t>(Below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t HashString(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t PairSeed(std::uint64_t base_seed, std::string_view topic_id,
                       std::string_view passage_id) {
  std::uint64_t h = Mix64(base_seed);
  h = Mix64(h ^ HashString(topic_id));
  h = Mix64(h ^ HashString(passage_id));
  return h;
}

}  // namespace holefill
