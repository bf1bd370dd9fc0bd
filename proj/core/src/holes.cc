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

#include "holefill/holes.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <vector>

#include "holefill/csv.h"
#include "holefill/errors.h"
#include "holefill/random.h"

namespace holefill {

void HoleSpec::Validate() const {
  if (!(drop_fraction >= 0.0 && drop_fraction <= 1.0)) {
    throw InvalidArgument("drop fraction must lie in [0, 1]");
  }
}

void HoleSet::Insert(JudgmentKey key, RelevanceGrade origin_grade) {
  if (origin_grade.value() == 0) {
    throw InvalidArgument("grade-0 judgment (" + key.topic_id + ", " +
                          key.passage_id + ") cannot be a hole");
  }
  std::string label = "(" + key.topic_id + ", " + key.passage_id + ")";
  if (!holes_.emplace(std::move(key), origin_grade).second) {
    throw InvalidArgument("duplicate hole " + label);
  }
}

std::optional<RelevanceGrade> HoleSet::OriginGrade(const JudgmentKey& key) const {
  auto it = holes_.find(key);
  if (it == holes_.end()) return std::nullopt;
  return it->second;
}

std::array<std::size_t, 4> HoleSet::GradeCounts() const {
  std::array<std::size_t, 4> counts{};
  for (const auto& [key, grade] : holes_) ++counts[grade.value()];
  return counts;
}

JudgmentSet HoleSet::ToJudgmentSet() const {
  JudgmentSet judgments("holes");
  for (const auto& [key, grade] : holes_) {
    judgments.Insert(key.topic_id, key.passage_id, grade);
  }
  return judgments;
}

std::size_t DropCount(double fraction, std::size_t n) {
  const double exact = fraction * static_cast<double>(n);
  // Products such as 0.29 * 100 land a few ulps below the integer they stand
  // for; nudge by a relative epsilon before flooring.
  const double nudged = exact + 1e-9 * std::max(1.0, exact);
  return std::min(n, static_cast<std::size_t>(std::floor(nudged)));
}

namespace {

using Stratum = std::vector<JudgmentKey>;

// Removes floor(fraction * |stratum|) keys of `stratum`, all of grade `grade`.
void DropFrom(const Stratum& stratum, RelevanceGrade grade, double fraction,
              Rng& rng, HoleSimulation& out) {
  const std::size_t count = DropCount(fraction, stratum.size());
  for (std::size_t index : rng.SampleIndices(stratum.size(), count)) {
    const JudgmentKey& key = stratum[index];
    out.retained.Erase(key.topic_id, key.passage_id);
    out.holes.Insert(key, grade);
  }
}

}  // namespace

HoleSimulation SimulateHoles(const JudgmentSet& complete, const HoleSpec& spec) {
  spec.Validate();
  HoleSimulation out{complete, {}};
  out.retained.set_source_name(complete.source_name());
  Rng rng(spec.seed);

  if (!spec.per_topic) {
    std::array<Stratum, 4> strata;
    for (const auto& [topic, passages] : complete.topics()) {
      for (const auto& [passage, grade] : passages) {
        strata[grade.value()].push_back({topic, passage});
      }
    }
    for (int g = 1; g <= RelevanceGrade::kMax; ++g) {
      DropFrom(strata[g], RelevanceGrade::FromInt(g), spec.drop_fraction, rng, out);
    }
    return out;
  }

  for (const auto& [topic, passages] : complete.topics()) {
    std::array<Stratum, 4> strata;
    for (const auto& [passage, grade] : passages) {
      strata[grade.value()].push_back({topic, passage});
    }
    for (int g = 1; g <= RelevanceGrade::kMax; ++g) {
      DropFrom(strata[g], RelevanceGrade::FromInt(g), spec.drop_fraction, rng, out);
    }
  }
  return out;
}

JudgmentSet Reconstruct(const JudgmentSet& retained, const HoleSet& holes) {
  JudgmentSet complete = retained;
  for (const auto& [key, grade] : holes.entries()) {
    complete.Insert(key.topic_id, key.passage_id, grade);
  }
  return complete;
}

UnjudgedAudit AuditUnjudged(const RunRanking& run, const JudgmentSet& judgments,
                            int k) {
  if (k < 1) throw InvalidArgument("audit depth must be at least 1");
  UnjudgedAudit audit;
  for (const auto& [topic, ranking] : run.topics()) {
    const auto* judged = judgments.Topic(topic);
    std::size_t count = 0;
    const std::size_t depth = std::min<std::size_t>(k, ranking.size());
    for (std::size_t i = 0; i < depth; ++i) {
      if (judged == nullptr || !judged->contains(ranking[i].passage_id)) ++count;
    }
    audit.per_topic[topic] = count;
    audit.total += count;
  }
  return audit;
}

void WriteHolesCsv(const HoleSet& holes, std::ostream& out) {
  WriteCsvRow(out, {"topic_id", "passage_id", "origin_grade"});
  for (const auto& [key, grade] : holes.entries()) {
    WriteCsvRow(out, {key.topic_id, key.passage_id, std::to_string(grade.value())});
  }
  if (!out) throw Error("failed writing holes CSV");
}

HoleSet ParseHolesCsv(std::istream& in) {
  HoleSet holes;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line_number == 1) continue;  // header
    if (line.empty() || line == "\r") continue;
    auto fields = ParseCsvLine(line);
    if (fields.size() != 3) {
      throw ParseError(line_number, "expected 3 fields");
    }
    int grade = 0;
    auto [ptr, ec] = std::from_chars(fields[2].data(),
                                     fields[2].data() + fields[2].size(), grade);
    if (ec != std::errc() || ptr != fields[2].data() + fields[2].size() ||
        grade < 1 || grade > RelevanceGrade::kMax) {
      throw ParseError(line_number, "origin grade must be 1, 2 or 3");
    }
    JudgmentKey key{fields[0], fields[1]};
    if (!IsValidToken(key.topic_id) || !IsValidToken(key.passage_id)) {
      throw ParseError(line_number, "invalid id");
    }
    if (holes.Contains(key)) throw ParseError(line_number, "duplicate hole");
    holes.Insert(std::move(key), RelevanceGrade::FromInt(grade));
  }
  return holes;
}

HoleSet HolesFromJudgments(const JudgmentSet& judgments) {
  HoleSet holes;
  for (const auto& [topic, passages] : judgments.topics()) {
    for (const auto& [passage, grade] : passages) {
      holes.Insert({topic, passage}, grade);
    }
  }
  return holes;
}

}  // namespace holefill
