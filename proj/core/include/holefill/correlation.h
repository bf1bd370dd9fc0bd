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

#ifndef HOLEFILL_CORRELATION_H_
#define HOLEFILL_CORRELATION_H_

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace holefill {

// Mean metric value per system, keyed by run tag.
using SystemScoreVector = std::map<std::string, double>;

inline constexpr char kTauVariant[] = "tau-b";

// Pair counts behind a Kendall tau-b value. Every unordered pair of systems
// falls in exactly one bucket:
//   concordant + discordant + ties_a + ties_b + ties_both == n(n-1)/2
// where ties_a / ties_b are pairs tied only in the first / second vector.
struct TauResult {
  double tau = 0.0;
  std::size_t n_systems = 0;
  std::uint64_t concordant = 0;
  std::uint64_t discordant = 0;
  std::uint64_t ties_a = 0;
  std::uint64_t ties_b = 0;
  std::uint64_t ties_both = 0;
};

// tau-b = (C - D) / sqrt((C + D + T_a) * (C + D + T_b)), computed from the raw
// scores in O(n log n). Throws InvalidArgument when the tag sets differ, when
// fewer than two systems are given, or when either vector is entirely tied.
TauResult KendallTau(const SystemScoreVector& a, const SystemScoreVector& b);

// tau-b from already-counted pairs; shared so that every route applies the
// identical final formula.
double TauFromCounts(std::uint64_t concordant, std::uint64_t discordant,
                     std::uint64_t ties_a, std::uint64_t ties_b);

// Systems sorted by descending score, ties broken by ascending tag.
std::vector<std::pair<std::string, double>> RankSystems(
    const SystemScoreVector& scores);

}  // namespace holefill

#endif  // HOLEFILL_CORRELATION_H_
