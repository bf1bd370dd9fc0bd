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

#include "holefill/metrics.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>

#include "holefill/csv.h"
#include "holefill/errors.h"

namespace holefill {

namespace {

// Unjudged passages grade 0 under either policy; see HolePolicy.
int GradeOf(const RankedPassage& passage,
            const JudgmentSet::PassageGrades& judged, HolePolicy) {
  auto it = judged.find(passage.passage_id);
  return it == judged.end() ? 0 : it->second.value();
}

double GainOf(int grade, Gain gain) {
  switch (gain) {
    case Gain::kLinear:
      return grade;
    case Gain::kExponential:
      return std::ldexp(1.0, grade) - 1.0;
  }
  return grade;
}

std::size_t CutoffOf(const MetricConfig& config) {
  return static_cast<std::size_t>(config.cutoff_k);
}

}  // namespace

void MetricConfig::Validate() const {
  if (cutoff_k < 1) {
    throw InvalidArgument("cutoff k must be at least 1, got " +
                          std::to_string(cutoff_k));
  }
}

double NdcgAtK(std::span<const RankedPassage> ranking,
               const JudgmentSet::PassageGrades& judged,
               const MetricConfig& config, HolePolicy policy) {
  const std::size_t k = CutoffOf(config);
  double dcg = 0.0;
  for (std::size_t i = 0; i < std::min(k, ranking.size()); ++i) {
    dcg += GainOf(GradeOf(ranking[i], judged, policy), config.gain) /
           std::log2(static_cast<double>(i) + 2.0);
  }

  std::vector<int> ideal;
  ideal.reserve(judged.size());
  for (const auto& [passage, grade] : judged) ideal.push_back(grade.value());
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  double idcg = 0.0;
  for (std::size_t i = 0; i < std::min(k, ideal.size()); ++i) {
    idcg += GainOf(ideal[i], config.gain) / std::log2(static_cast<double>(i) + 2.0);
  }
  return idcg > 0.0 ? dcg / idcg : 0.0;
}

double AveragePrecision(std::span<const RankedPassage> ranking,
                        const JudgmentSet::PassageGrades& judged,
                        const MetricConfig& config, HolePolicy policy) {
  const int threshold = config.relevance_threshold.value();
  std::size_t total_relevant = 0;
  for (const auto& [passage, grade] : judged) {
    if (grade.value() >= threshold) ++total_relevant;
  }
  if (total_relevant == 0) return 0.0;

  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    if (GradeOf(ranking[i], judged, policy) >= threshold) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(total_relevant);
}

double PrecisionAtK(std::span<const RankedPassage> ranking,
                    const JudgmentSet::PassageGrades& judged,
                    const MetricConfig& config, HolePolicy policy) {
  const std::size_t k = CutoffOf(config);
  const int threshold = config.relevance_threshold.value();
  std::size_t hits = 0;
  for (std::size_t i = 0; i < std::min(k, ranking.size()); ++i) {
    if (GradeOf(ranking[i], judged, policy) >= threshold) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(k);
}

RunEvaluation EvaluateRun(const RunRanking& run, const JudgmentSet& judgments,
                          const MetricConfig& config, HolePolicy policy) {
  config.Validate();
  RunEvaluation result;
  result.system_tag = run.system_tag();
  result.mean.topic_id = "all";
  const std::size_t k = CutoffOf(config);

  for (const auto& [topic, ranking] : run.topics()) {
    const JudgmentSet::PassageGrades* judged = judgments.Topic(topic);
    if (judged == nullptr) continue;
    TopicScore score;
    score.topic_id = topic;
    score.ndcg = NdcgAtK(ranking, *judged, config, policy);
    score.average_precision = AveragePrecision(ranking, *judged, config, policy);
    score.precision_at_k = PrecisionAtK(ranking, *judged, config, policy);
    for (std::size_t i = 0; i < std::min(k, ranking.size()); ++i) {
      if (!judged->contains(ranking[i].passage_id)) ++result.unjudged_at_k;
    }
    result.per_topic.push_back(std::move(score));
  }
  if (result.per_topic.empty()) {
    throw InvalidArgument("run '" + run.system_tag() +
                          "' shares no topic with the judgments");
  }

  for (const TopicScore& score : result.per_topic) {
    result.mean.ndcg += score.ndcg;
    result.mean.average_precision += score.average_precision;
    result.mean.precision_at_k += score.precision_at_k;
  }
  const double n = static_cast<double>(result.per_topic.size());
  result.mean.ndcg /= n;
  result.mean.average_precision /= n;
  result.mean.precision_at_k /= n;
  return result;
}

void WritePerTopicCsv(std::span<const RunEvaluation> evaluations,
                      const MetricConfig& config, std::ostream& out) {
  const std::string k = std::to_string(config.cutoff_k);
  WriteCsvRow(out, {"system_tag", "topic_id", "ndcg@" + k, "map", "p@" + k});
  for (const RunEvaluation& evaluation : evaluations) {
    for (const TopicScore& score : evaluation.per_topic) {
      WriteCsvRow(out, {evaluation.system_tag, score.topic_id,
                        FormatDouble(score.ndcg),
                        FormatDouble(score.average_precision),
                        FormatDouble(score.precision_at_k)});
    }
  }
  if (!out) throw Error("failed writing per-topic CSV");
}

}  // namespace holefill
