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

#include "holefill/experiment.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "holefill/cache.h"
#include "holefill/csv.h"
#include "holefill/errors.h"
#include "holefill/holes.h"
#include "holefill/version.h"

namespace holefill {

using json = nlohmann::json;

namespace {

constexpr char kNotAvailable[] = "NA";

std::string FormatOptional(const std::optional<double>& value) {
  return value ? FormatDouble(*value) : kNotAvailable;
}

std::string FormatFixed(const std::optional<double>& value, int digits) {
  if (!value) return kNotAvailable;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, *value);
  return buf;
}

std::string UtcNow() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string GainName(Gain gain) {
  return gain == Gain::kLinear ? "linear" : "exponential";
}

std::string DescribeMetric(const MetricConfig& metric) {
  return "ndcg@" + std::to_string(metric.cutoff_k) + " (" + GainName(metric.gain) +
         " gain, log2(i+1) discount)";
}

bool HasLlm(const SweepConfig& config) {
  return std::any_of(config.assessors.begin(), config.assessors.end(),
                     [](const AssessorSpec& spec) {
                       return spec.kind == AssessorSpec::Kind::kRemoteLlm;
                     });
}

std::filesystem::path Resolve(const std::filesystem::path& base,
                              const std::string& value) {
  std::filesystem::path p(value);
  return p.is_absolute() ? p : base / p;
}

}  // namespace

void SweepConfig::Validate() const {
  for (double f : fractions_retained) {
    if (!(f > 0.0 && f <= 1.0)) {
      throw InvalidArgument("retained fractions must lie in (0, 1], got " +
                            FormatDouble(f));
    }
  }
  if (trials < 1) throw InvalidArgument("trials must be at least 1");
  if (assessors.empty()) throw InvalidArgument("no assessor selected");
  metric.Validate();
  if (per_label_examples == 0) {
    throw InvalidArgument("per-label example count must be positive");
  }
}

SweepConfig LoadSweepConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open sweep config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument("sweep config " + path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("sweep config must be a JSON object");

  static const std::set<std::string> kKeys = {
      "qrels", "runs", "queries", "passages", "report_dir", "cache",
      "prompt_template", "fractions_retained", "trials", "base_seed",
      "assessors", "k", "relevance_threshold", "gain", "per_topic_holes",
      "zero_shot", "per_label_examples", "fixed_examples", "model", "endpoint",
      "api_key_env", "temperature", "max_tokens", "max_retries",
      "max_in_flight", "threads"};
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.contains(key)) {
      throw InvalidArgument("sweep config: unknown key '" + key + "'");
    }
  }

  const std::filesystem::path base = path.parent_path();
  SweepConfig config;
  try {
    auto path_of = [&](const char* key, std::filesystem::path& out) {
      if (j.contains(key)) out = Resolve(base, j[key].get<std::string>());
    };
    path_of("qrels", config.qrels);
    path_of("runs", config.runs);
    path_of("queries", config.queries);
    path_of("passages", config.passages);
    path_of("report_dir", config.report_dir);
    path_of("cache", config.cache);
    path_of("prompt_template", config.prompt_template);

    if (j.contains("fractions_retained")) {
      config.fractions_retained = j["fractions_retained"].get<std::vector<double>>();
    }
    if (j.contains("trials")) config.trials = j["trials"].get<int>();
    if (j.contains("base_seed")) config.base_seed = j["base_seed"].get<std::uint64_t>();
    if (j.contains("assessors")) {
      config.assessors.clear();
      for (const auto& spec : j["assessors"]) {
        config.assessors.push_back(ParseAssessorSpec(spec.get<std::string>()));
      }
    }
    if (j.contains("k")) config.metric.cutoff_k = j["k"].get<int>();
    if (j.contains("relevance_threshold")) {
      config.metric.relevance_threshold =
          RelevanceGrade::FromInt(j["relevance_threshold"].get<int>());
    }
    if (j.contains("gain")) {
      const auto gain = j["gain"].get<std::string>();
      if (gain == "linear") {
        config.metric.gain = Gain::kLinear;
      } else if (gain == "exponential") {
        config.metric.gain = Gain::kExponential;
      } else {
        throw InvalidArgument("gain must be 'linear' or 'exponential'");
      }
    }
    if (j.contains("per_topic_holes")) {
      config.per_topic_holes = j["per_topic_holes"].get<bool>();
    }
    if (j.contains("zero_shot") && j["zero_shot"].get<bool>()) {
      config.prompt_mode = PromptMode::kZeroShot;
    }
    if (j.contains("per_label_examples")) {
      config.per_label_examples = j["per_label_examples"].get<std::size_t>();
    }
    if (j.contains("fixed_examples")) {
      config.fixed_examples = j["fixed_examples"].get<bool>();
    }
    if (j.contains("model")) config.llm.model_name = j["model"].get<std::string>();
    if (j.contains("endpoint")) config.llm.endpoint = j["endpoint"].get<std::string>();
    if (j.contains("api_key_env")) {
      config.llm.api_key_env = j["api_key_env"].get<std::string>();
    }
    if (j.contains("temperature")) {
      config.llm.decoding.temperature = j["temperature"].get<double>();
    }
    if (j.contains("max_tokens")) config.llm.decoding.max_tokens = j["max_tokens"].get<int>();
    if (j.contains("max_retries")) config.llm.max_retries = j["max_retries"].get<int>();
    if (j.contains("max_in_flight")) {
      config.llm.max_in_flight = j["max_in_flight"].get<std::size_t>();
    }
    if (j.contains("threads")) config.threads = j["threads"].get<std::size_t>();
  } catch (const json::exception& e) {
    throw InvalidArgument("sweep config " + path.string() + ": " + e.what());
  }
  config.Validate();
  return config;
}

SweepInputs LoadSweepInputs(const SweepConfig& config) {
  if (config.qrels.empty()) throw InvalidArgument("no qrels given");
  if (config.runs.empty()) throw InvalidArgument("no runs given");
  SweepInputs inputs;
  inputs.complete = ReadQrelsFile(config.qrels);
  inputs.runs = ReadRuns(config.runs);
  if (HasLlm(config)) {
    if (config.queries.empty() || config.passages.empty()) {
      throw InvalidArgument("the llm assessor needs query and passage text tables");
    }
    inputs.queries = std::make_shared<TextStore>(ReadTextTableFile(config.queries));
    inputs.passages = std::make_shared<TextStore>(ReadTextTableFile(config.passages));
  }
  return inputs;
}

std::vector<AggregateRow> AggregateTrials(const std::vector<TrialRow>& rows,
                                          const std::vector<double>& fractions,
                                          const std::vector<std::string>& assessors) {
  std::vector<AggregateRow> aggregates;
  for (double fraction : fractions) {
    for (const std::string& assessor : assessors) {
      std::vector<double> taus;
      for (const TrialRow& row : rows) {
        if (row.fraction_retained == fraction && row.assessor == assessor && row.tau) {
          taus.push_back(*row.tau);
        }
      }
      AggregateRow aggregate;
      aggregate.fraction_retained = fraction;
      aggregate.assessor = assessor;
      aggregate.n_trials = taus.size();
      if (!taus.empty()) {
        double sum = 0.0;
        for (double tau : taus) sum += tau;
        const double mean = sum / static_cast<double>(taus.size());
        aggregate.mean_tau = mean;
        if (taus.size() >= 2) {
          double squares = 0.0;
          for (double tau : taus) squares += (tau - mean) * (tau - mean);
          aggregate.var_tau = squares / static_cast<double>(taus.size() - 1);
        }
      }
      aggregates.push_back(std::move(aggregate));
    }
  }
  return aggregates;
}

ExperimentReport RunSweep(const SweepConfig& config, const SweepInputs& inputs,
                          const SweepHooks& hooks) {
  config.Validate();
  if (inputs.runs.size() < 2) {
    throw InvalidArgument("a sweep needs at least two runs, got " +
                          std::to_string(inputs.runs.size()));
  }
  std::set<std::string> tags;
  for (const RunRanking& run : inputs.runs) {
    if (!tags.insert(run.system_tag()).second) {
      throw InvalidArgument("two runs share the tag '" + run.system_tag() + "'");
    }
  }

  ExperimentReport report;
  for (const RunRanking& run : inputs.runs) {
    report.ground_truth[run.system_tag()] =
        EvaluateRun(run, inputs.complete, config.metric, HolePolicy::kTreatAsNonRelevant)
            .mean.ndcg;
  }

  const bool has_llm = HasLlm(config);
  const PromptTemplate prompt_template = config.prompt_template.empty()
                                             ? PromptTemplate::Default()
                                             : PromptTemplate::FromFile(config.prompt_template);
  auto truth = std::make_shared<const JudgmentSet>(inputs.complete);

  // One remote assessor for the whole sweep so its request limit is global.
  std::shared_ptr<Assessor> shared_llm;
  if (has_llm) {
    if (!inputs.queries || !inputs.passages) {
      throw InvalidArgument("the llm assessor needs query and passage texts");
    }
    AssessorContext context;
    context.llm = config.llm;
    context.client = hooks.client;
    context.cache = hooks.cache;
    if (!context.cache && !config.cache.empty()) {
      context.cache = std::make_shared<ResponseCache>(config.cache);
    }
    AssessorSpec llm_spec;
    llm_spec.kind = AssessorSpec::Kind::kRemoteLlm;
    shared_llm = MakeAssessor(llm_spec, context);
  }

  std::vector<std::string> labels;
  for (const AssessorSpec& spec : config.assessors) labels.push_back(spec.ToString());

  struct CellOutput {
    std::vector<TrialRow> rows;
    std::vector<SystemScoreRow> scores;
  };
  const std::size_t n_cells = config.fractions_retained.size() *
                              static_cast<std::size_t>(config.trials);
  std::vector<CellOutput> cells(n_cells);

  auto run_cell = [&](std::size_t cell_index) {
    const double fraction =
        config.fractions_retained[cell_index / static_cast<std::size_t>(config.trials)];
    const int trial = static_cast<int>(cell_index % static_cast<std::size_t>(config.trials));
    const std::uint64_t seed = TrialSeed(config.base_seed, static_cast<std::uint64_t>(trial));
    CellOutput& out = cells[cell_index];

    std::optional<HoleSimulation> simulation;
    std::string simulation_error;
    try {
      simulation = SimulateHoles(inputs.complete,
                                 HoleSpec{1.0 - fraction, seed, config.per_topic_holes});
    } catch (const std::exception& e) {
      simulation_error = e.what();
    }

    for (std::size_t a = 0; a < config.assessors.size(); ++a) {
      TrialRow row;
      row.fraction_retained = fraction;
      row.trial = trial;
      row.assessor = labels[a];
      row.seed = seed;
      row.n_systems = inputs.runs.size();
      try {
        if (!simulation) throw Error(simulation_error);
        const AssessorSpec& spec = config.assessors[a];
        std::shared_ptr<Assessor> assessor = shared_llm;
        if (spec.kind != AssessorSpec::Kind::kRemoteLlm) {
          AssessorContext context;
          context.truth = truth;
          context.seed = seed;
          assessor = MakeAssessor(spec, context);
        }
        std::optional<PromptBuilder> prompts;
        if (assessor->needs_prompt()) {
          prompts.emplace(simulation->retained, *inputs.queries, *inputs.passages,
                          prompt_template,
                          PromptOptions{config.prompt_mode, config.per_label_examples,
                                        seed, config.fixed_examples});
        }
        PatchResult patch = PatchJudgments(simulation->retained, simulation->holes,
                                           *assessor, prompts ? &*prompts : nullptr);
        SystemScoreVector scores;
        for (const RunRanking& run : inputs.runs) {
          scores[run.system_tag()] =
              EvaluateRun(run, patch.patched, config.metric, HolePolicy::kUsePatched)
                  .mean.ndcg;
        }
        row.tau = KendallTau(report.ground_truth, scores).tau;
        for (const auto& [tag, score] : scores) {
          out.scores.push_back({fraction, trial, labels[a], tag, score});
        }
      } catch (const std::exception& e) {
        row.error = e.what();
        spdlog::warn("sweep cell (fraction {}, trial {}, {}) failed: {}",
                     FormatDouble(fraction), trial, labels[a], row.error);
      }
      out.rows.push_back(std::move(row));
    }
  };

  const std::size_t threads = std::min(std::max<std::size_t>(1, config.threads), n_cells);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n_cells; ++i) run_cell(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    for (std::size_t t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < n_cells; i = next.fetch_add(1)) {
          run_cell(i);
        }
      });
    }
  }

  for (CellOutput& cell : cells) {
    for (TrialRow& row : cell.rows) report.rows.push_back(std::move(row));
    for (SystemScoreRow& row : cell.scores) report.system_scores.push_back(std::move(row));
  }
  report.aggregates = AggregateTrials(report.rows, config.fractions_retained, labels);

  Provenance& p = report.provenance;
  p.base_seed = config.base_seed;
  p.trials = config.trials;
  p.fractions_retained = config.fractions_retained;
  p.assessors = labels;
  p.metric = DescribeMetric(config.metric);
  p.model_name = has_llm ? config.llm.model_name : "";
  p.decoding = config.llm.decoding;
  p.prompt_mode = config.prompt_mode == PromptMode::kFewShot ? "few-shot" : "zero-shot";
  p.per_label_examples = config.per_label_examples;
  p.prompt_template_hash = PromptHash(prompt_template.text());
  p.toolkit_version = HOLEFILL_VERSION;
  p.generated_at = UtcNow();
  return report;
}

void WriteTrialsCsv(const ExperimentReport& report, std::ostream& out) {
  WriteCsvRow(out, {"fraction_retained", "trial", "assessor", "tau", "n_systems", "seed"});
  for (const TrialRow& row : report.rows) {
    WriteCsvRow(out, {FormatDouble(row.fraction_retained), std::to_string(row.trial),
                      row.assessor, FormatOptional(row.tau),
                      std::to_string(row.n_systems), std::to_string(row.seed)});
  }
}

void WriteAggregatesCsv(const ExperimentReport& report, std::ostream& out) {
  WriteCsvRow(out, {"fraction_retained", "assessor", "mean_tau", "var_tau"});
  for (const AggregateRow& row : report.aggregates) {
    WriteCsvRow(out, {FormatDouble(row.fraction_retained), row.assessor,
                      FormatOptional(row.mean_tau), FormatOptional(row.var_tau)});
  }
}

void WriteSystemScoresCsv(const ExperimentReport& report, int cutoff_k,
                          std::ostream& out) {
  WriteCsvRow(out, {"fraction_retained", "trial", "assessor", "system_tag",
                    "ndcg@" + std::to_string(cutoff_k)});
  for (const SystemScoreRow& row : report.system_scores) {
    WriteCsvRow(out, {FormatDouble(row.fraction_retained), std::to_string(row.trial),
                      row.assessor, row.system_tag, FormatDouble(row.score)});
  }
}

void WriteFailuresCsv(const ExperimentReport& report, std::ostream& out) {
  WriteCsvRow(out, {"fraction_retained", "trial", "assessor", "seed", "error"});
  for (const TrialRow& row : report.rows) {
    if (row.tau) continue;
    WriteCsvRow(out, {FormatDouble(row.fraction_retained), std::to_string(row.trial),
                      row.assessor, std::to_string(row.seed), row.error});
  }
}

void WriteSummaryTable(const ExperimentReport& report, std::ostream& out) {
  std::size_t width = 8;
  for (const AggregateRow& row : report.aggregates) {
    width = std::max(width, row.assessor.size());
  }
  char line[256];
  std::snprintf(line, sizeof(line), "%-9s  %-*s  %9s  %11s  %6s\n", "retained",
                static_cast<int>(width), "assessor", "mean_tau", "var_tau", "trials");
  out << line;
  out << std::string(9 + 2 + width + 2 + 9 + 2 + 11 + 2 + 6, '-') << '\n';
  for (const AggregateRow& row : report.aggregates) {
    std::snprintf(line, sizeof(line), "%-9s  %-*s  %9s  %11s  %6zu\n",
                  FormatFixed(row.fraction_retained, 2).c_str(),
                  static_cast<int>(width), row.assessor.c_str(),
                  FormatFixed(row.mean_tau, 4).c_str(),
                  FormatFixed(row.var_tau, 6).c_str(), row.n_trials);
    out << line;
  }
}

std::string ProvenanceJson(const Provenance& p) {
  json j = {
      {"base_seed", p.base_seed},
      {"trial_seeds", "base_seed + trial"},
      {"trials", p.trials},
      {"fractions_retained", p.fractions_retained},
      {"assessors", p.assessors},
      {"metric", p.metric},
      {"model", p.model_name},
      {"decoding", {{"temperature", p.decoding.temperature},
                    {"max_tokens", p.decoding.max_tokens}}},
      {"prompt_mode", p.prompt_mode},
      {"per_label_examples", p.per_label_examples},
      {"prompt_template_sha256", p.prompt_template_hash},
      {"tau_variant", p.tau_variant},
      {"variance_estimator", p.variance_estimator},
      {"toolkit_version", p.toolkit_version},
      {"generated_at", p.generated_at},
  };
  return j.dump(2) + "\n";
}

void WriteReport(const ExperimentReport& report, int cutoff_k,
                 const std::filesystem::path& dir, unsigned formats) {
  std::filesystem::create_directories(dir);
  auto write = [&](const char* name, auto&& writer) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error("cannot write " + (dir / name).string());
    writer(out);
    if (!out) throw Error("failed writing " + (dir / name).string());
  };
  if (formats & kReportCsv) {
    write("trials.csv", [&](std::ostream& o) { WriteTrialsCsv(report, o); });
    write("aggregates.csv", [&](std::ostream& o) { WriteAggregatesCsv(report, o); });
    write("system_scores.csv",
          [&](std::ostream& o) { WriteSystemScoresCsv(report, cutoff_k, o); });
    write("failures.csv", [&](std::ostream& o) { WriteFailuresCsv(report, o); });
  }
  if (formats & kReportTable) {
    write("summary.txt", [&](std::ostream& o) { WriteSummaryTable(report, o); });
  }
  write("provenance.json",
        [&](std::ostream& o) { o << ProvenanceJson(report.provenance); });
}

RunComparison CompareSingleRun(const RunRanking& run, const JudgmentSet& complete,
                               const JudgmentSet& patched, const MetricConfig& config) {
  const RunEvaluation truth =
      EvaluateRun(run, complete, config, HolePolicy::kTreatAsNonRelevant);
  const RunEvaluation filled = EvaluateRun(run, patched, config, HolePolicy::kUsePatched);
  RunComparison comparison;
  comparison.system_tag = run.system_tag();
  comparison.cutoff_k = config.cutoff_k;
  comparison.ground_truth = {truth.mean.ndcg, truth.mean.average_precision};
  comparison.patched = {filled.mean.ndcg, filled.mean.average_precision};
  comparison.delta = {comparison.patched.ndcg - comparison.ground_truth.ndcg,
                      comparison.patched.map - comparison.ground_truth.map};
  return comparison;
}

void WriteComparisonTable(const RunComparison& c, std::ostream& out) {
  const std::string ndcg = "nDCG@" + std::to_string(c.cutoff_k);
  char line[256];
  std::snprintf(line, sizeof(line), "%-28s  %10s  %10s\n", "experiment", ndcg.c_str(),
                "MAP");
  out << line;
  auto row = [&](const std::string& label, const MetricPair& m, bool signed_values) {
    std::snprintf(line, sizeof(line),
                  signed_values ? "%-28s  %+10.4f  %+10.4f\n" : "%-28s  %10.4f  %10.4f\n",
                  label.c_str(), m.ndcg, m.map);
    out << line;
  };
  row(c.system_tag + " (GT)", c.ground_truth, false);
  row(c.system_tag + " (patched)", c.patched, false);
  row("delta", c.delta, true);
}

}  // namespace holefill
