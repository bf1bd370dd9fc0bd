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

// holefill: patch unjudged holes in TREC judgments and measure how the
// patched judgments change system rankings.
//
//   holefill evaluate --qrels Q --runs DIR
//   holefill simulate --qrels Q --fraction 0.9 --seed 7 --out-dir OUT
//   holefill patch    --qrels RETAINED --holes HOLES --assessor llm ...
//   holefill sweep    --config sweep.json
//   holefill compare  --run R --qrels Q --patched P

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "holefill/assessor.h"
#include "holefill/cache.h"
#include "holefill/errors.h"
#include "holefill/experiment.h"
#include "holefill/holes.h"
#include "holefill/metrics.h"
#include "holefill/prompting.h"
#include "holefill/trec_io.h"
#include "holefill/version.h"

namespace fs = std::filesystem;

namespace {

using namespace holefill;

struct MetricFlags {
  int k = 10;
  int threshold = 2;
  std::string gain = "linear";

  void Register(CLI::App* app) {
    app->add_option("--k", k, "Metric cutoff")->check(CLI::PositiveNumber);
    app->add_option("--threshold", threshold,
                    "Lowest grade counted relevant by MAP and P@k")
        ->check(CLI::Range(0, 3));
    app->add_option("--gain", gain, "nDCG gain")
        ->check(CLI::IsMember({"linear", "exponential"}));
  }

  MetricConfig ToConfig() const {
    MetricConfig config;
    config.cutoff_k = k;
    config.relevance_threshold = RelevanceGrade::FromInt(threshold);
    config.gain = gain == "exponential" ? Gain::kExponential : Gain::kLinear;
    return config;
  }
};

struct LlmFlags {
  std::string model;
  std::string endpoint;
  std::string api_key_env = "OPENAI_API_KEY";
  double temperature = 0.0;
  int max_tokens = 512;
  int max_retries = 2;
  std::size_t max_in_flight = 4;

  void Register(CLI::App* app) {
    app->add_option("--model", model, "Model name sent to the endpoint");
    app->add_option("--endpoint", endpoint,
                    "Chat-completions URL, e.g. http://localhost:8000/v1/chat/completions");
    app->add_option("--api-key-env", api_key_env,
                    "Environment variable holding the API credential");
    app->add_option("--temperature", temperature)->check(CLI::NonNegativeNumber);
    app->add_option("--max-tokens", max_tokens)->check(CLI::PositiveNumber);
    app->add_option("--max-retries", max_retries)->check(CLI::NonNegativeNumber);
    app->add_option("--max-in-flight", max_in_flight, "Concurrent request limit")
        ->check(CLI::PositiveNumber);
  }

  void ApplyTo(RemoteLlmConfig& config, const CLI::App* app) const {
    if (app->count("--model")) config.model_name = model;
    if (app->count("--endpoint")) config.endpoint = endpoint;
    if (app->count("--api-key-env")) config.api_key_env = api_key_env;
    if (app->count("--temperature")) config.decoding.temperature = temperature;
    if (app->count("--max-tokens")) config.decoding.max_tokens = max_tokens;
    if (app->count("--max-retries")) config.max_retries = max_retries;
    if (app->count("--max-in-flight")) config.max_in_flight = max_in_flight;
  }
};

void PrintEvaluations(const std::vector<RunEvaluation>& evaluations,
                      const MetricConfig& config) {
  const std::string k = std::to_string(config.cutoff_k);
  std::printf("%-24s  %8s  %8s  %8s  %8s  %s\n", "system", ("nDCG@" + k).c_str(),
              "MAP", ("P@" + k).c_str(), "topics", ("unjudged@" + k).c_str());
  for (const RunEvaluation& e : evaluations) {
    std::printf("%-24s  %8.4f  %8.4f  %8.4f  %8zu  %zu\n", e.system_tag.c_str(),
                e.mean.ndcg, e.mean.average_precision, e.mean.precision_at_k,
                e.per_topic.size(), e.unjudged_at_k);
  }
}

int RunEvaluate(const fs::path& qrels_path, const fs::path& runs_path,
                const MetricFlags& metric_flags, const std::string& per_topic_csv,
                bool audit) {
  const MetricConfig config = metric_flags.ToConfig();
  const JudgmentSet qrels = ReadQrelsFile(qrels_path);
  std::vector<RunEvaluation> evaluations;
  for (const RunRanking& run : ReadRuns(runs_path)) {
    evaluations.push_back(EvaluateRun(run, qrels, config, HolePolicy::kTreatAsNonRelevant));
    if (audit) {
      const UnjudgedAudit counts = AuditUnjudged(run, qrels, config.cutoff_k);
      for (const auto& [topic, count] : counts.per_topic) {
        std::printf("audit %s %s unjudged@%d=%zu\n", run.system_tag().c_str(),
                    topic.c_str(), config.cutoff_k, count);
      }
    }
  }
  PrintEvaluations(evaluations, config);
  if (!per_topic_csv.empty()) {
    std::ofstream out(per_topic_csv, std::ios::binary);
    if (!out) throw Error("cannot write " + per_topic_csv);
    WritePerTopicCsv(evaluations, config, out);
  }
  return 0;
}

int RunSimulate(const fs::path& qrels_path, double fraction, std::uint64_t seed,
                bool per_topic, const fs::path& out_dir) {
  const JudgmentSet complete = ReadQrelsFile(qrels_path);
  const HoleSimulation sim = SimulateHoles(complete, HoleSpec{fraction, seed, per_topic});
  fs::create_directories(out_dir);
  WriteQrelsFile(sim.retained, out_dir / "retained.qrels");
  WriteQrelsFile(sim.holes.ToJudgmentSet(), out_dir / "holes.qrels");
  {
    std::ofstream out(out_dir / "holes.csv", std::ios::binary);
    if (!out) throw Error("cannot write " + (out_dir / "holes.csv").string());
    WriteHolesCsv(sim.holes, out);
  }
  const auto total = complete.GradeCounts();
  const auto dropped = sim.holes.GradeCounts();
  std::printf("grade  judged  dropped\n");
  for (int g = 0; g <= 3; ++g) {
    std::printf("%5d  %6zu  %7zu\n", g, total[g], dropped[g]);
  }
  std::printf("retained %zu of %zu judgments\n", sim.retained.size(), complete.size());
  return 0;
}

HoleSet ReadHoles(const fs::path& path) {
  if (path.extension() == ".csv") {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return ParseHolesCsv(in);
  }
  return HolesFromJudgments(ReadQrelsFile(path));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Patch unjudged holes in TREC relevance judgments"};
  app.set_version_flag("--version", HOLEFILL_VERSION);
  app.require_subcommand(1);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score runs against qrels");
  std::string eval_qrels, eval_runs, eval_per_topic;
  bool eval_audit = false;
  MetricFlags eval_metric;
  evaluate->add_option("--qrels", eval_qrels, "Judgments")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--runs", eval_runs, "Run file or directory of runs")
      ->required()
      ->check(CLI::ExistingPath);
  evaluate->add_option("--per-topic", eval_per_topic, "Write per-topic scores as CSV");
  evaluate->add_flag("--audit", eval_audit, "Print unjudged top-k counts per topic");
  eval_metric.Register(evaluate);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Remove relevant judgments to create holes");
  std::string sim_qrels, sim_out;
  double sim_fraction = 0.0;
  std::uint64_t sim_seed = 0;
  bool sim_per_topic = false;
  simulate->add_option("--qrels", sim_qrels, "Complete judgments")
      ->required()
      ->check(CLI::ExistingFile);
  simulate->add_option("--fraction", sim_fraction,
                       "Fraction of each relevant grade to drop")
      ->required()
      ->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--seed", sim_seed, "Sampling seed");
  simulate->add_flag("--per-topic-sampling", sim_per_topic,
                     "Drop the fraction inside every topic instead of globally");
  simulate->add_option("--out-dir", sim_out, "Directory for retained/holes files")
      ->required();

  // patch
  auto* patch = app.add_subcommand("patch", "Fill holes with assessor grades");
  std::string patch_qrels, patch_holes, patch_truth, patch_queries, patch_passages,
      patch_out, patch_audit, patch_cache, patch_template;
  std::string patch_assessor = "llm";
  std::uint64_t patch_seed = 0;
  std::size_t patch_per_label = 2;
  bool patch_zero_shot = false, patch_fixed = false;
  LlmFlags patch_llm;
  patch->add_option("--qrels", patch_qrels, "Retained judgments")
      ->required()
      ->check(CLI::ExistingFile);
  patch->add_option("--holes", patch_holes, "Holes as qrels or CSV")
      ->required()
      ->check(CLI::ExistingFile);
  patch->add_option("--assessor", patch_assessor,
                    "llm | oracle | constant:<grade> | noisy:<p>");
  patch->add_option("--truth", patch_truth,
                    "Ground truth for oracle/noisy (default: retained + hole grades)")
      ->check(CLI::ExistingFile);
  patch->add_option("--queries", patch_queries, "Query text table")->check(CLI::ExistingFile);
  patch->add_option("--passages", patch_passages, "Passage text table")
      ->check(CLI::ExistingFile);
  patch->add_option("--seed", patch_seed, "Seed for example sampling and noise");
  patch->add_option("--per-label-examples", patch_per_label)->check(CLI::PositiveNumber);
  patch->add_flag("--zero-shot", patch_zero_shot, "Prompt without in-context examples");
  patch->add_flag("--fixed-examples", patch_fixed, "Reuse one example set for every hole");
  patch->add_option("--prompt-template", patch_template, "Override the prompt template")
      ->check(CLI::ExistingFile);
  patch->add_option("--cache", patch_cache, "JSON-lines response cache");
  patch->add_option("--out", patch_out, "Patched qrels")->required();
  patch->add_option("--audit", patch_audit, "Per-hole verdict CSV");
  patch_llm.Register(patch);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Hole-fraction sweep with Kendall tau report");
  std::string sweep_config, sweep_qrels, sweep_runs, sweep_queries, sweep_passages,
      sweep_cache, sweep_report;
  std::vector<double> sweep_fractions;
  std::vector<std::string> sweep_assessors;
  int sweep_trials = 3, sweep_k = 10;
  std::uint64_t sweep_seed = 0;
  std::size_t sweep_per_label = 2, sweep_threads = 1;
  bool sweep_zero_shot = false;
  LlmFlags sweep_llm;
  sweep->add_option("--config", sweep_config, "JSON sweep description")
      ->check(CLI::ExistingFile);
  sweep->add_option("--qrels", sweep_qrels)->check(CLI::ExistingFile);
  sweep->add_option("--runs", sweep_runs)->check(CLI::ExistingPath);
  sweep->add_option("--queries", sweep_queries)->check(CLI::ExistingFile);
  sweep->add_option("--passages", sweep_passages)->check(CLI::ExistingFile);
  sweep->add_option("--fraction", sweep_fractions, "Retained fraction (repeatable)");
  sweep->add_option("--trials", sweep_trials)->check(CLI::PositiveNumber);
  sweep->add_option("--seed", sweep_seed, "Base seed; trial t uses seed + t");
  sweep->add_option("--assessor", sweep_assessors, "Assessor (repeatable)");
  sweep->add_option("--k", sweep_k, "nDCG cutoff")->check(CLI::PositiveNumber);
  sweep->add_option("--cache", sweep_cache);
  sweep->add_flag("--zero-shot", sweep_zero_shot);
  sweep->add_option("--per-label-examples", sweep_per_label)->check(CLI::PositiveNumber);
  sweep->add_option("--report-dir", sweep_report);
  sweep->add_option("--threads", sweep_threads)->check(CLI::PositiveNumber);
  sweep_llm.Register(sweep);

  // compare
  auto* compare = app.add_subcommand("compare", "Score one run with complete and patched qrels");
  std::string cmp_run, cmp_qrels;
  std::vector<std::string> cmp_patched;
  MetricFlags cmp_metric;
  compare->add_option("--run", cmp_run)->required()->check(CLI::ExistingFile);
  compare->add_option("--qrels", cmp_qrels, "Complete judgments")
      ->required()
      ->check(CLI::ExistingFile);
  compare->add_option("--patched", cmp_patched, "Patched judgments (repeatable)")
      ->required()
      ->check(CLI::ExistingFile);
  cmp_metric.Register(compare);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*evaluate) {
      return RunEvaluate(eval_qrels, eval_runs, eval_metric, eval_per_topic, eval_audit);
    }
    if (*simulate) {
      return RunSimulate(sim_qrels, sim_fraction, sim_seed, sim_per_topic, sim_out);
    }
    if (*patch) {
      const AssessorSpec spec = ParseAssessorSpec(patch_assessor);
      const JudgmentSet retained = ReadQrelsFile(patch_qrels);
      const HoleSet holes = ReadHoles(patch_holes);

      AssessorContext context;
      context.seed = patch_seed;
      context.truth = std::make_shared<const JudgmentSet>(
          patch_truth.empty() ? Reconstruct(retained, holes) : ReadQrelsFile(patch_truth));
      patch_llm.ApplyTo(context.llm, patch);
      if (!patch_cache.empty()) context.cache = std::make_shared<ResponseCache>(patch_cache);
      auto assessor = MakeAssessor(spec, context);

      std::shared_ptr<TextStore> queries, passages;
      std::optional<PromptBuilder> prompts;
      if (assessor->needs_prompt()) {
        if (patch_queries.empty() || patch_passages.empty()) {
          throw InvalidArgument("--queries and --passages are required for the llm assessor");
        }
        queries = std::make_shared<TextStore>(ReadTextTableFile(patch_queries));
        passages = std::make_shared<TextStore>(ReadTextTableFile(patch_passages));
        prompts.emplace(retained, *queries, *passages,
                        patch_template.empty() ? PromptTemplate::Default()
                                               : PromptTemplate::FromFile(patch_template),
                        PromptOptions{patch_zero_shot ? PromptMode::kZeroShot
                                                      : PromptMode::kFewShot,
                                      patch_per_label, patch_seed, patch_fixed});
      }
      const PatchResult result =
          PatchJudgments(retained, holes, *assessor, prompts ? &*prompts : nullptr);
      WriteQrelsFile(result.patched, patch_out);
      if (!patch_audit.empty()) {
        std::ofstream out(patch_audit, std::ios::binary);
        if (!out) throw Error("cannot write " + patch_audit);
        WritePatchAudit(result.audit, out);
      }
      std::size_t fallbacks = 0, cached = 0;
      for (const auto& entry : result.audit) {
        fallbacks += entry.source == VerdictSource::kFallback;
        cached += entry.source == VerdictSource::kCached;
      }
      std::printf("patched %zu holes with %s (%zu cached, %zu fallback); %zu judgments\n",
                  holes.size(), assessor->name().c_str(), cached, fallbacks,
                  result.patched.size());
      return 0;
    }
    if (*sweep) {
      SweepConfig config = sweep_config.empty() ? SweepConfig{} : LoadSweepConfig(sweep_config);
      if (sweep->count("--qrels")) config.qrels = sweep_qrels;
      if (sweep->count("--runs")) config.runs = sweep_runs;
      if (sweep->count("--queries")) config.queries = sweep_queries;
      if (sweep->count("--passages")) config.passages = sweep_passages;
      if (sweep->count("--fraction")) config.fractions_retained = sweep_fractions;
      if (sweep->count("--trials")) config.trials = sweep_trials;
      if (sweep->count("--seed")) config.base_seed = sweep_seed;
      if (sweep->count("--assessor")) {
        config.assessors.clear();
        for (const auto& a : sweep_assessors) config.assessors.push_back(ParseAssessorSpec(a));
      }
      if (sweep->count("--k")) config.metric.cutoff_k = sweep_k;
      if (sweep->count("--cache")) config.cache = sweep_cache;
      if (sweep_zero_shot) config.prompt_mode = PromptMode::kZeroShot;
      if (sweep->count("--per-label-examples")) config.per_label_examples = sweep_per_label;
      if (sweep->count("--report-dir")) config.report_dir = sweep_report;
      if (sweep->count("--threads")) config.threads = sweep_threads;
      sweep_llm.ApplyTo(config.llm, sweep);
      if (config.report_dir.empty()) throw InvalidArgument("--report-dir is required");

      const SweepInputs inputs = LoadSweepInputs(config);
      const ExperimentReport report = RunSweep(config, inputs);
      WriteReport(report, config.metric.cutoff_k, config.report_dir);
      WriteSummaryTable(report, std::cout);
      std::size_t failed = 0;
      for (const auto& row : report.rows) failed += !row.tau.has_value();
      if (failed > 0) {
        std::fprintf(stderr, "%zu sweep cells failed; see failures.csv\n", failed);
      }
      return 0;
    }
    if (*compare) {
      const MetricConfig config = cmp_metric.ToConfig();
      const RunRanking run = ReadRunFile(cmp_run);
      const JudgmentSet complete = ReadQrelsFile(cmp_qrels);
      for (const std::string& path : cmp_patched) {
        std::printf("# patched: %s\n", path.c_str());
        WriteComparisonTable(CompareSingleRun(run, complete, ReadQrelsFile(path), config),
                             std::cout);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
