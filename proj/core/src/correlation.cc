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

#include "holefill/correlation.h"

#include <algorithm>
#include <cmath>

#include "holefill/errors.h"

namespace holefill {

namespace {

std::uint64_t PairsIn(std::uint64_t group) { return group * (group - 1) / 2; }

// Sum of t(t-1)/2 over runs of equal adjacent elements under `equal`.
template <typename It, typename Eq>
std::uint64_t TiedPairs(It begin, It end, Eq equal) {
  std::uint64_t total = 0;
  while (begin != end) {
    It run_end = begin + 1;
    while (run_end != end && equal(*begin, *run_end)) ++run_end;
    total += PairsIn(static_cast<std::uint64_t>(run_end - begin));
    begin = run_end;
  }
  return total;
}

// Stable merge sort of `values` that returns the number of strict inversions.
std::uint64_t SortCountingInversions(std::vector<double>& values,
                                     std::vector<double>& scratch,
                                     std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t swaps = SortCountingInversions(values, scratch, lo, mid) +
                        SortCountingInversions(values, scratch, mid, hi);
  std::size_t i = lo, j = mid, out = lo;
  while (i < mid && j < hi) {
    if (values[j] < values[i]) {
      swaps += mid - i;
      scratch[out++] = values[j++];
    } else {
      scratch[out++] = values[i++];
    }
  }
  while (i < mid) scratch[out++] = values[i++];
  while (j < hi) scratch[out++] = values[j++];
  std::copy(scratch.begin() + lo, scratch.begin() + hi, values.begin() + lo);
  return swaps;
}

}  // namespace

double TauFromCounts(std::uint64_t concordant, std::uint64_t discordant,
                     std::uint64_t ties_a, std::uint64_t ties_b) {
  const double untied_a = static_cast<double>(concordant + discordant + ties_a);
  const double untied_b = static_cast<double>(concordant + discordant + ties_b);
  const double denominator = std::sqrt(untied_a * untied_b);
  if (denominator == 0.0) {
    throw InvalidArgument("Kendall tau is undefined: a score vector is fully tied");
  }
  const double tau =
      (static_cast<double>(concordant) - static_cast<double>(discordant)) /
      denominator;
  return std::clamp(tau, -1.0, 1.0);
}

TauResult KendallTau(const SystemScoreVector& a, const SystemScoreVector& b) {
  if (a.size() != b.size() ||
      !std::equal(a.begin(), a.end(), b.begin(),
                  [](const auto& x, const auto& y) { return x.first == y.first; })) {
    throw InvalidArgument("score vectors cover different systems");
  }
  if (a.size() < 2) {
    throw InvalidArgument("Kendall tau needs at least two systems");
  }

  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(a.size());
  for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib) {
    pairs.emplace_back(ia->second, ib->second);
  }
  std::sort(pairs.begin(), pairs.end());

  const std::uint64_t n = pairs.size();
  const std::uint64_t all_pairs = PairsIn(n);
  const std::uint64_t tied_a = TiedPairs(
      pairs.begin(), pairs.end(),
      [](const auto& x, const auto& y) { return x.first == y.first; });
  const std::uint64_t tied_both =
      TiedPairs(pairs.begin(), pairs.end(),
                [](const auto& x, const auto& y) { return x == y; });

  std::vector<double> second(n), scratch(n);
  for (std::size_t i = 0; i < n; ++i) second[i] = pairs[i].second;
  // Within a run of tied first values the second values are ascending, so
  // every inversion is a strictly discordant pair.
  const std::uint64_t discordant = SortCountingInversions(second, scratch, 0, n);
  const std::uint64_t tied_b = TiedPairs(
      second.begin(), second.end(), [](double x, double y) { return x == y; });

  TauResult result;
  result.n_systems = n;
  result.ties_both = tied_both;
  result.ties_a = tied_a - tied_both;
  result.ties_b = tied_b - tied_both;
  result.discordant = discordant;
  result.concordant = all_pairs - tied_a - tied_b + tied_both - discordant;
  result.tau = TauFromCounts(result.concordant, result.discordant,
                             result.ties_a, result.ties_b);
  return result;
}

std::vector<std::pair<std::string, double>> RankSystems(
    const SystemScoreVector& scores) {
  std::vector<std::pair<std::string, double>> ranked(scores.begin(), scores.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
    return x.second > y.second;
  });
  return ranked;
}

}  // namespace holefill
