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

// nDCG@k, average precision and precision@k over graded judgments.
//
// Conventions follow trec_eval: DCG@k = sum_{i=1..k} gain(rel_i) / log2(i+1)
// with linear gain by default, the ideal DCG is built from every judged
// passage of the topic, and a topic whose ideal DCG is zero scores 0.
// Average precision runs over the full ranking and divides by the number of
// judged relevant passages. Both AP and P@k binarize at
// `relevance_threshold`.

#ifndef HOLEFILL_METRICS_H_
#define HOLEFILL_METRICS_H_

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "holefill/trec_io.h"

namespace holefill {

// How passages missing from the judgments are scored. Both variants grade
// them 0. kUsePatched asserts the judgments were already patched; residual
// unjudged passages are then only reported through
// RunEvaluation::unjudged_at_k.
enum class HolePolicy { kTreatAsNonRelevant, kUsePatched };

enum class Gain { kLinear, kExponential };

struct MetricConfig {
  int cutoff_k = 10;
  RelevanceGrade relevance_threshold = RelevanceGrade::FromInt(2);
  Gain gain = Gain::kLinear;

  // Throws InvalidArgument when cutoff_k < 1.
  void Validate() const;
};

struct TopicScore {
  std::string topic_id;
  double ndcg = 0.0;
  double average_precision = 0.0;
  double precision_at_k = 0.0;
};

double NdcgAtK(std::span<const RankedPassage> ranking,
               const JudgmentSet::PassageGrades& judged,
               const MetricConfig& config, HolePolicy policy);

double AveragePrecision(std::span<const RankedPassage> ranking,
                        const JudgmentSet::PassageGrades& judged,
                        const MetricConfig& config, HolePolicy policy);

// Rankings shorter than k count the missing positions as non-relevant.
double PrecisionAtK(std::span<const RankedPassage> ranking,
                    const JudgmentSet::PassageGrades& judged,
                    const MetricConfig& config, HolePolicy policy);

struct RunEvaluation {
  std::string system_tag;
  std::vector<TopicScore> per_topic;  // ordered by topic_id
  TopicScore mean;                    // topic_id "all"
  // Top-k positions, summed over evaluated topics, holding an unjudged passage.
  std::size_t unjudged_at_k = 0;
};

// Scores every run topic that has judgments; other topics are skipped.
// Throws InvalidArgument when no run topic is judged.
RunEvaluation EvaluateRun(const RunRanking& run, const JudgmentSet& judgments,
                          const MetricConfig& config, HolePolicy policy);

// CSV with header `system_tag,topic_id,ndcg@<k>,map,p@<k>`.
void WritePerTopicCsv(std::span<const RunEvaluation> evaluations,
                      const MetricConfig& config, std::ostream& out);

}  // namespace holefill

#endif  // HOLEFILL_METRICS_H_
