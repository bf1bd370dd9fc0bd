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

// Synthetic incomplete judgments.
//
// For each relevant grade g in {1,2,3} with n_g judged pairs, exactly
// floor(drop_fraction * n_g) pairs are removed, drawn uniformly without
// replacement. Grade-0 judgments are never removed. By default the draw pools
// every topic together; `per_topic` applies the same rule inside each topic.

#ifndef HOLEFILL_HOLES_H_
#define HOLEFILL_HOLES_H_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "holefill/trec_io.h"

namespace holefill {

struct HoleSpec {
  double drop_fraction = 0.0;
  std::uint64_t seed = 0;
  bool per_topic = false;

  // Throws InvalidArgument unless 0 <= drop_fraction <= 1.
  void Validate() const;
};

// Judgments removed from a complete set, with the grade each one had.
class HoleSet {
 public:
  using Map = std::map<JudgmentKey, RelevanceGrade>;

  // Throws InvalidArgument for grade 0 or a duplicate pair.
  void Insert(JudgmentKey key, RelevanceGrade origin_grade);

  bool Contains(const JudgmentKey& key) const { return holes_.contains(key); }
  std::optional<RelevanceGrade> OriginGrade(const JudgmentKey& key) const;

  const Map& entries() const { return holes_; }
  std::size_t size() const { return holes_.size(); }
  bool empty() const { return holes_.empty(); }

  // Count of holes per origin grade, indexed by grade value (index 0 is 0).
  std::array<std::size_t, 4> GradeCounts() const;

  // The holes as qrels, carrying their origin grades.
  JudgmentSet ToJudgmentSet() const;

  friend bool operator==(const HoleSet&, const HoleSet&) = default;

 private:
  Map holes_;
};

struct HoleSimulation {
  JudgmentSet retained;
  HoleSet holes;
};

// floor(fraction * n), robust to representation error in `fraction`
// (0.29 * 100 yields 29, not 28).
std::size_t DropCount(double fraction, std::size_t n);

HoleSimulation SimulateHoles(const JudgmentSet& complete, const HoleSpec& spec);

// retained plus every hole at its origin grade.
JudgmentSet Reconstruct(const JudgmentSet& retained, const HoleSet& holes);

// Seed used for trial `trial` of a sweep started from `base_seed`.
constexpr std::uint64_t TrialSeed(std::uint64_t base_seed, std::uint64_t trial) {
  return base_seed + trial;
}

struct UnjudgedAudit {
  std::map<std::string, std::size_t> per_topic;
  std::size_t total = 0;
};

// Counts top-k passages of each run topic that are absent from `judgments`.
UnjudgedAudit AuditUnjudged(const RunRanking& run, const JudgmentSet& judgments,
                            int k);

// Sidecar CSV `topic_id,passage_id,origin_grade`.
void WriteHolesCsv(const HoleSet& holes, std::ostream& out);
HoleSet ParseHolesCsv(std::istream& in);

// Reads holes back from their qrels export. Grade-0 lines are rejected.
HoleSet HolesFromJudgments(const JudgmentSet& judgments);

}  // namespace holefill

#endif  // HOLEFILL_HOLES_H_
