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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "holefill/errors.h"
#include "metric_oracle.h"

namespace holefill {
namespace {

SystemScoreVector Vec(const std::vector<double>& values) {
  SystemScoreVector v;
  for (std::size_t i = 0; i < values.size(); ++i) v["s" + std::to_string(10 + i)] = values[i];
  return v;
}

std::vector<double> Values(const SystemScoreVector& v) {
  std::vector<double> out;
  for (const auto& [tag, score] : v) out.push_back(score);
  return out;
}

TEST(KendallTau, IdentityAndReversal) {
  SystemScoreVector a = Vec({0.1, 0.5, 0.3, 0.9, 0.7});
  EXPECT_EQ(KendallTau(a, a).tau, 1.0);
  SystemScoreVector reversed = Vec({0.9, 0.5, 0.7, 0.1, 0.3});
  EXPECT_EQ(KendallTau(a, reversed).tau, -1.0);
}

TEST(KendallTau, OneAdjacentSwapOfFour) {
  TauResult r = KendallTau(Vec({1, 2, 3, 4}), Vec({1, 3, 2, 4}));
  EXPECT_EQ(r.concordant, 5u);
  EXPECT_EQ(r.discordant, 1u);
  EXPECT_NEAR(r.tau, 4.0 / 6.0, 1e-15);
  EXPECT_EQ(r.n_systems, 4u);
}

TEST(KendallTau, MatchesScipyTauB) {
  struct Case {
    std::vector<double> a, b;
    double expected;
  };
  // scipy.stats.kendalltau(a, b, variant="b") 1.x.
  const Case cases[] = {
      {{1, 2, 3, 4, 5}, {1, 3, 2, 4, 5}, 0.7999999999999999},
      {{1, 1, 2, 2, 3, 3}, {1, 2, 1, 3, 3, 2}, 0.41666666666666674},
      {{0.5, 0.5, 0.5, 0.9, 0.1}, {0.2, 0.3, 0.3, 0.3, 0.1}, 0.7142857142857142},
      {{3, 1, 4, 1, 5, 9, 2, 6}, {2, 7, 1, 8, 2, 8, 1, 8}, 0.16051447078102563},
  };
  for (const Case& c : cases) {
    EXPECT_NEAR(KendallTau(Vec(c.a), Vec(c.b)).tau, c.expected, 1e-12);
  }
}

TEST(KendallTau, AgreesExactlyWithPairEnumeration) {
  std::mt19937_64 rng(2024);
  for (int instance = 0; instance < 200; ++instance) {
    std::size_t n = 2 + rng() % 40;
    bool ties = instance % 2 == 1;
    std::uniform_int_distribution<int> coarse(0, 4);
    std::uniform_real_distribution<double> fine(0.0, 1.0);
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = ties ? coarse(rng) : fine(rng);
      b[i] = ties ? coarse(rng) : fine(rng);
    }
    SystemScoreVector va = Vec(a), vb = Vec(b);
    oracle::PairCounts expected = oracle::CountPairs(Values(va), Values(vb));
    bool degenerate = expected.concordant + expected.discordant + expected.ties_b == 0 ||
                      expected.concordant + expected.discordant + expected.ties_a == 0;
    if (degenerate) {
      EXPECT_THROW(KendallTau(va, vb), InvalidArgument);
      continue;
    }
    TauResult got = KendallTau(va, vb);
    EXPECT_EQ(got.concordant, expected.concordant);
    EXPECT_EQ(got.discordant, expected.discordant);
    EXPECT_EQ(got.ties_a, expected.ties_a);
    EXPECT_EQ(got.ties_b, expected.ties_b);
    EXPECT_EQ(got.ties_both, expected.ties_both);
    EXPECT_EQ(got.tau, TauFromCounts(expected.concordant, expected.discordant,
                                     expected.ties_a, expected.ties_b));
    EXPECT_NEAR(got.tau, oracle::TauB(expected), 1e-12);
    EXPECT_GE(got.tau, -1.0);
    EXPECT_LE(got.tau, 1.0);
  }
}

TEST(KendallTau, SymmetricAndInvariantToIncreasingTransforms) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> coarse(0, 6);
  for (int instance = 0; instance < 50; ++instance) {
    std::vector<double> a(12), b(12), c(12);
    for (int i = 0; i < 12; ++i) {
      a[i] = coarse(rng);
      b[i] = coarse(rng);
      c[i] = std::exp(a[i]) * 3.0 - 1.0;
    }
    TauResult ab = KendallTau(Vec(a), Vec(b));
    EXPECT_EQ(ab.tau, KendallTau(Vec(b), Vec(a)).tau);
    EXPECT_EQ(ab.tau, KendallTau(Vec(c), Vec(b)).tau);
  }
}

TEST(KendallTau, Errors) {
  EXPECT_THROW(KendallTau(Vec({1.0}), Vec({1.0})), InvalidArgument);
  EXPECT_THROW(KendallTau(Vec({1, 2, 3}), Vec({1, 2})), InvalidArgument);
  SystemScoreVector a = {{"x", 1.0}, {"y", 2.0}};
  SystemScoreVector b = {{"x", 1.0}, {"z", 2.0}};
  EXPECT_THROW(KendallTau(a, b), InvalidArgument);
  EXPECT_THROW(KendallTau(Vec({1, 1, 1}), Vec({1, 2, 3})), InvalidArgument);
}

TEST(RankSystems, DescendingScoreThenTag) {
  SystemScoreVector v = {{"b", 0.5}, {"a", 0.5}, {"c", 0.9}};
  auto ranked = RankSystems(v);
  ASSERT_EQ(ranked.size(), 3u);
  EXPECT_EQ(ranked[0].first, "c");
  EXPECT_EQ(ranked[1].first, "a");
  EXPECT_EQ(ranked[2].first, "b");
}

}  // namespace
}  // namespace holefill
