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

// Hole-fraction sweeps and single-run comparisons.
//
// A sweep cell is one (retained fraction, trial, assessor). For each cell the
// complete judgments lose 1 - fraction of their relevant labels (seeded with
// base_seed + trial), the holes are patched by the assessor, every run is
// scored with the patched judgments, and the resulting system ranking is
// compared against the ranking under the complete judgments with Kendall
// tau-b.
//
// Report files written by WriteReport:
//   trials.csv         fraction_retained,trial,assessor,tau,n_systems,seed
//   aggregates.csv     fraction_retained,assessor,mean_tau,var_tau
//   system_scores.csv  fraction_retained,trial,assessor,system_tag,ndcg@<k>
//   failures.csv       fraction_retained,trial,assessor,seed,error
//   summary.txt        aligned text table of the aggregates
//   provenance.json    seeds, model, decoding, prompt hash, version, time
// Failed cells carry tau "NA". var_tau is the sample variance (n - 1) over
// the successful trials of a (fraction, assessor) group, "NA" below 2 trials.

#ifndef HOLEFILL_EXPERIMENT_H_
#define HOLEFILL_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "holefill/assessor.h"
#include "holefill/correlation.h"
#include "holefill/metrics.h"
#include "holefill/prompting.h"
#include "holefill/trec_io.h"

namespace holefill {

struct SweepConfig {
  std::vector<double> fractions_retained = {0.1, 0.2, 0.3, 0.4, 0.5,
                                            0.6, 0.7, 0.8, 0.9};
  int trials = 3;
  std::uint64_t base_seed = 0;
  std::vector<AssessorSpec> assessors = {ParseAssessorSpec("constant:0")};
  MetricConfig metric;
  bool per_topic_holes = false;

  // Prompt construction for the llm assessor; the prompt seed is the trial
  // seed.
  PromptMode prompt_mode = PromptMode::kFewShot;
  std::size_t per_label_examples = 2;
  bool fixed_examples = false;
  std::filesystem::path prompt_template;  // empty: built-in template
  RemoteLlmConfig llm;
  std::filesystem::path cache;  // empty: no persistent cache

  std::filesystem::path qrels;
  std::filesystem::path runs;
  std::filesystem::path queries;
  std::filesystem::path passages;
  std::filesystem::path report_dir;

  std::size_t threads = 1;  // sweep cells evaluated concurrently

  // Throws InvalidArgument on fractions outside (0, 1], trials < 1, or an
  // invalid metric config.
  void Validate() const;
};

// Reads a JSON sweep description. Relative paths resolve against the
// directory holding the file. Unknown keys are rejected.
SweepConfig LoadSweepConfig(const std::filesystem::path& path);

struct SweepInputs {
  JudgmentSet complete;
  std::vector<RunRanking> runs;
  std::shared_ptr<const TextStore> queries;   // null unless an llm assessor runs
  std::shared_ptr<const TextStore> passages;  // null unless an llm assessor runs
};

SweepInputs LoadSweepInputs(const SweepConfig& config);

struct TrialRow {
  double fraction_retained = 0.0;
  int trial = 0;
  std::string assessor;
  std::uint64_t seed = 0;
  std::optional<double> tau;  // empty for a failed cell
  std::size_t n_systems = 0;
  std::string error;
};

struct AggregateRow {
  double fraction_retained = 0.0;
  std::string assessor;
  std::optional<double> mean_tau;
  std::optional<double> var_tau;
  std::size_t n_trials = 0;  // successful trials behind the aggregate
};

struct SystemScoreRow {
  double fraction_retained = 0.0;
  int trial = 0;
  std::string assessor;
  std::string system_tag;
  double score = 0.0;
};

struct Provenance {
  std::uint64_t base_seed = 0;
  int trials = 0;
  std::vector<double> fractions_retained;
  std::vector<std::string> assessors;
  std::string metric;
  std::string model_name;
  Decoding decoding;
  std::string prompt_mode;
  std::size_t per_label_examples = 0;
  std::string prompt_template_hash;
  std::string tau_variant = kTauVariant;
  std::string variance_estimator = "sample (n-1)";
  std::string toolkit_version;
  std::string generated_at;  // ISO-8601 UTC; excluded from determinism checks
};

struct ExperimentReport {
  // Rows sorted by (fraction, trial, assessor position in the config).
  std::vector<TrialRow> rows;
  std::vector<AggregateRow> aggregates;  // by (fraction, assessor position)
  std::vector<SystemScoreRow> system_scores;
  SystemScoreVector ground_truth;
  Provenance provenance;
};

// Optional injection points, used by tests and the CLI.
struct SweepHooks {
  std::shared_ptr<ChatClient> client;
  std::shared_ptr<ResponseCache> cache;
};

// Cell failures are recorded as rows and do not stop the sweep. Errors in
// the inputs themselves (no runs, unscorable ground truth) throw.
ExperimentReport RunSweep(const SweepConfig& config, const SweepInputs& inputs,
                          const SweepHooks& hooks = {});

// Recomputes aggregates from trial rows; RunSweep uses the same routine.
std::vector<AggregateRow> AggregateTrials(const std::vector<TrialRow>& rows,
                                          const std::vector<double>& fractions,
                                          const std::vector<std::string>& assessors);

enum ReportFormat : unsigned { kReportCsv = 1u, kReportTable = 2u };

void WriteTrialsCsv(const ExperimentReport& report, std::ostream& out);
void WriteAggregatesCsv(const ExperimentReport& report, std::ostream& out);
void WriteSystemScoresCsv(const ExperimentReport& report, int cutoff_k,
                          std::ostream& out);
void WriteFailuresCsv(const ExperimentReport& report, std::ostream& out);
void WriteSummaryTable(const ExperimentReport& report, std::ostream& out);
std::string ProvenanceJson(const Provenance& provenance);

// Creates `dir` if needed and writes the files listed above.
void WriteReport(const ExperimentReport& report, int cutoff_k,
                 const std::filesystem::path& dir,
                 unsigned formats = kReportCsv | kReportTable);

struct MetricPair {
  double ndcg = 0.0;
  double map = 0.0;
};

struct RunComparison {
  std::string system_tag;
  int cutoff_k = 10;
  MetricPair ground_truth;
  MetricPair patched;
  MetricPair delta;  // patched - ground_truth
};

// Scores one run under the complete and the patched judgments.
RunComparison CompareSingleRun(const RunRanking& run, const JudgmentSet& complete,
                               const JudgmentSet& patched, const MetricConfig& config);

void WriteComparisonTable(const RunComparison& comparison, std::ostream& out);

}  // namespace holefill

#endif  // HOLEFILL_EXPERIMENT_H_
