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

#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "holefill/cache.h"
#include "holefill/csv.h"
#include "holefill/errors.h"
#include "holefill/llm_client.h"
#include "test_util.h"

namespace holefill {
namespace {


SweepInputs RandomInputs(std::uint64_t seed, std::size_t systems = 6) {
  std::mt19937_64 rng(seed);
  SweepInputs inputs;
  inputs.complete = testing::RandomJudgments(rng, 20, 150);
  inputs.runs = testing::RandomRuns(rng, inputs.complete, systems, 30);
  return inputs;
}

// Text tables whose entries name their own ids, so a fake model can recover
// the pair from the prompt.
void AddTexts(SweepInputs& inputs) {
  auto queries = std::make_shared<TextStore>();
  auto passages = std::make_shared<TextStore>();
  for (const auto& [topic, grades] : inputs.complete.topics()) {
    queries->Insert(topic, "query " + topic);
    for (const auto& [passage, grade] : grades) {
      if (!passages->Find(passage)) passages->Insert(passage, "passage " + passage);
    }
  }
  inputs.queries = queries;
  inputs.passages = passages;
}

std::string LastValue(const std::string& prompt, const std::string& label) {
  std::size_t at = prompt.rfind("\n" + label);
  if (at == std::string::npos) return "";
  at += label.size() + 1;
  return prompt.substr(at, prompt.find('\n', at) - at);
}

// Answers with the true grade of the pair named in the prompt.
class TruthfulClient : public ChatClient {
 public:
  explicit TruthfulClient(JudgmentSet truth) : truth_(std::move(truth)) {}

  std::string Complete(const ChatRequest& request) override {
    ++calls_;
    std::string topic = LastValue(request.prompt, "Query: query ");
    std::string passage = LastValue(request.prompt, "Passage: passage ");
    auto grade = truth_.Find(topic, passage);
    if (!grade) throw TransportError("unknown pair " + topic + "/" + passage);
    return "Looks fine.\n" + std::to_string(grade->value());
  }

  std::size_t calls() const { return calls_; }

 private:
  JudgmentSet truth_;
  std::atomic<std::size_t> calls_{0};
};

class BrokenClient : public ChatClient {
 public:
  std::string Complete(const ChatRequest&) override {
    throw TransportError("connection refused");
  }
};

SweepConfig BaseConfig() {
  SweepConfig config;
  config.trials = 3;
  config.base_seed = 11;
  config.assessors = {ParseAssessorSpec("oracle"), ParseAssessorSpec("constant:0")};
  return config;
}

std::map<std::string, std::string> ReportFiles(const std::filesystem::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    files[entry.path().filename().string()] = testing::ReadFile(entry.path());
  }
  return files;
}

std::string WithoutTimestamp(std::string provenance) {
  std::size_t at = provenance.find("\"generated_at\"");
  if (at == std::string::npos) return provenance;
  return provenance.erase(at, provenance.find('\n', at) - at);
}

TEST(RunSweep, ProducesOneRowPerCellAndOneAggregatePerGroup) {
  SweepInputs inputs = RandomInputs(1);
  ExperimentReport report = RunSweep(BaseConfig(), inputs);
  EXPECT_EQ(report.rows.size(), 9u * 3u * 2u);
  EXPECT_EQ(report.aggregates.size(), 9u * 2u);
  EXPECT_EQ(report.system_scores.size(), 9u * 3u * 2u * inputs.runs.size());
  EXPECT_EQ(report.ground_truth.size(), inputs.runs.size());
  // Rows ordered by fraction, trial, then assessor position.
  EXPECT_EQ(report.rows[0].assessor, "oracle");
  EXPECT_EQ(report.rows[1].assessor, "constant:0");
  EXPECT_EQ(report.rows[2].trial, 1);
  EXPECT_EQ(report.rows[6].fraction_retained, 0.2);
  for (const TrialRow& row : report.rows) {
    EXPECT_EQ(row.seed, 11u + static_cast<std::uint64_t>(row.trial));
    EXPECT_EQ(row.n_systems, inputs.runs.size());
  }
}

TEST(RunSweep, OracleRecoversTheGroundTruthRankingEverywhere) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SweepInputs inputs = RandomInputs(seed);
    SweepConfig config = BaseConfig();
    config.assessors = {ParseAssessorSpec("oracle")};
    ExperimentReport report = RunSweep(config, inputs);
    for (const TrialRow& row : report.rows) {
      ASSERT_TRUE(row.tau) << row.error;
      EXPECT_EQ(*row.tau, 1.0);
    }
    for (const AggregateRow& row : report.aggregates) {
      EXPECT_EQ(row.mean_tau, 1.0);
      EXPECT_EQ(row.var_tau, 0.0);
      EXPECT_EQ(row.n_trials, 3u);
    }
    for (const SystemScoreRow& row : report.system_scores) {
      EXPECT_EQ(row.score, report.ground_truth.at(row.system_tag));
    }
  }
}

TEST(RunSweep, FullRetentionMatchesGroundTruthForEveryAssessor) {
  SweepInputs inputs = RandomInputs(3);
  SweepConfig config = BaseConfig();
  config.fractions_retained = {1.0};
  ExperimentReport report = RunSweep(config, inputs);
  for (const TrialRow& row : report.rows) EXPECT_EQ(row.tau, 1.0);
}

TEST(RunSweep, ReportFilesAreByteIdenticalAcrossRuns) {
  SweepInputs inputs = RandomInputs(4);
  SweepConfig config = BaseConfig();
  config.assessors.push_back(ParseAssessorSpec("noisy:0.3"));
  testing::TempDir dir;
  WriteReport(RunSweep(config, inputs), config.metric.cutoff_k, dir / "a");
  config.threads = 4;
  WriteReport(RunSweep(config, inputs), config.metric.cutoff_k, dir / "b");
  auto a = ReportFiles(dir / "a");
  auto b = ReportFiles(dir / "b");
  ASSERT_EQ(a.size(), 6u);
  ASSERT_EQ(b.size(), 6u);
  for (auto& [name, text] : a) {
    if (name == "provenance.json") {
      EXPECT_EQ(WithoutTimestamp(text), WithoutTimestamp(b[name]));
    } else {
      EXPECT_EQ(text, b[name]) << name;
    }
  }
}

TEST(RunSweep, DifferentSeedsChangeTheNoisyAssessor) {
  SweepInputs inputs = RandomInputs(4);
  SweepConfig config = BaseConfig();
  config.assessors = {ParseAssessorSpec("noisy:0.5")};
  std::ostringstream a, b;
  WriteSystemScoresCsv(RunSweep(config, inputs), 10, a);
  config.base_seed = 12345;
  WriteSystemScoresCsv(RunSweep(config, inputs), 10, b);
  EXPECT_NE(a.str(), b.str());
}

TEST(AggregateTrials, RecomputationMatchesStoredAggregates) {
  SweepInputs inputs = RandomInputs(5);
  SweepConfig config = BaseConfig();
  config.trials = 4;
  config.assessors = {ParseAssessorSpec("noisy:0.4"), ParseAssessorSpec("constant:1")};
  ExperimentReport report = RunSweep(config, inputs);
  std::vector<std::string> labels = {"noisy:0.4", "constant:1"};
  auto again = AggregateTrials(report.rows, config.fractions_retained, labels);
  ASSERT_EQ(again.size(), report.aggregates.size());
  for (std::size_t i = 0; i < again.size(); ++i) {
    EXPECT_EQ(again[i].mean_tau, report.aggregates[i].mean_tau);
    EXPECT_EQ(again[i].var_tau, report.aggregates[i].var_tau);
  }

  // Parse trials.csv back and recompute from the printed values; the
  // printed precision round-trips doubles exactly.
  std::ostringstream trials_csv, aggregates_csv;
  WriteTrialsCsv(report, trials_csv);
  WriteAggregatesCsv(report, aggregates_csv);
  std::istringstream in(trials_csv.str());
  std::string line;
  std::getline(in, line);
  std::vector<TrialRow> parsed;
  while (std::getline(in, line)) {
    auto fields = ParseCsvLine(line);
    ASSERT_EQ(fields.size(), 6u);
    TrialRow row;
    row.fraction_retained = std::stod(fields[0]);
    row.trial = std::stoi(fields[1]);
    row.assessor = fields[2];
    if (fields[3] != "NA") row.tau = std::stod(fields[3]);
    parsed.push_back(row);
  }
  ExperimentReport rebuilt;
  rebuilt.aggregates = AggregateTrials(parsed, config.fractions_retained, labels);
  std::ostringstream rebuilt_csv;
  WriteAggregatesCsv(rebuilt, rebuilt_csv);
  EXPECT_EQ(rebuilt_csv.str(), aggregates_csv.str());
}

TEST(AggregateTrials, SampleVarianceAndMissingValues) {
  auto row = [](double tau) {
    TrialRow r;
    r.fraction_retained = 0.5;
    r.assessor = "x";
    r.tau = tau;
    return r;
  };
  TrialRow failed = row(0.0);
  failed.tau.reset();
  auto aggregates = AggregateTrials({row(0.2), row(0.4), row(0.9), failed}, {0.5, 0.7}, {"x"});
  ASSERT_EQ(aggregates.size(), 2u);
  EXPECT_EQ(aggregates[0].n_trials, 3u);
  EXPECT_NEAR(*aggregates[0].mean_tau, 0.5, 1e-15);
  // Deviations -0.3, -0.1, 0.4: squares sum to 0.26, over n - 1 = 2.
  EXPECT_NEAR(*aggregates[0].var_tau, 0.13, 1e-15);
  EXPECT_FALSE(aggregates[1].mean_tau);
  EXPECT_FALSE(aggregates[1].var_tau);

  auto single = AggregateTrials({row(0.3)}, {0.5}, {"x"});
  EXPECT_EQ(single[0].mean_tau, 0.3);
  EXPECT_FALSE(single[0].var_tau);
}

TEST(RunSweep, LlmAssessorThatAnswersTruthfullyMatchesTheOracle) {
  SweepInputs inputs = RandomInputs(6);
  AddTexts(inputs);
  SweepConfig config = BaseConfig();
  config.fractions_retained = {0.3, 0.8};
  config.assessors = {ParseAssessorSpec("llm"), ParseAssessorSpec("oracle")};
  config.prompt_mode = PromptMode::kZeroShot;
  config.llm.model_name = "fake";
  auto client = std::make_shared<TruthfulClient>(inputs.complete);
  auto cache = std::make_shared<ResponseCache>();
  ExperimentReport report = RunSweep(config, inputs, {client, cache});
  for (const TrialRow& row : report.rows) {
    ASSERT_TRUE(row.tau) << row.error;
    EXPECT_EQ(*row.tau, 1.0);
  }
  EXPECT_GT(client->calls(), 0u);
  EXPECT_EQ(report.provenance.model_name, "fake");
  EXPECT_EQ(report.provenance.prompt_mode, "zero-shot");

  // Holes repeat across cells with identical prompts; the cache absorbs them.
  std::size_t first = client->calls();
  RunSweep(config, inputs, {client, cache});
  EXPECT_EQ(client->calls(), first);
}

TEST(RunSweep, FailedCellsAreRecordedAndTheSweepContinues) {
  SweepInputs inputs = RandomInputs(7);
  AddTexts(inputs);
  SweepConfig config = BaseConfig();
  config.fractions_retained = {0.5};
  config.trials = 2;
  config.assessors = {ParseAssessorSpec("llm"), ParseAssessorSpec("oracle")};
  config.prompt_mode = PromptMode::kZeroShot;
  config.llm.model_name = "fake";
  config.llm.max_retries = 1;
  config.llm.backoff = std::chrono::milliseconds(1);
  ExperimentReport report = RunSweep(config, inputs, {std::make_shared<BrokenClient>(), nullptr});
  ASSERT_EQ(report.rows.size(), 4u);
  for (const TrialRow& row : report.rows) {
    if (row.assessor == "llm") {
      EXPECT_FALSE(row.tau);
      EXPECT_NE(row.error.find("connection refused"), std::string::npos) << row.error;
    } else {
      EXPECT_EQ(row.tau, 1.0);
    }
  }
  EXPECT_FALSE(report.aggregates[0].mean_tau);
  EXPECT_EQ(report.aggregates[0].n_trials, 0u);
  EXPECT_EQ(report.aggregates[1].mean_tau, 1.0);

  testing::TempDir dir;
  WriteReport(report, 10, dir.path());
  std::string trials = testing::ReadFile(dir / "trials.csv");
  EXPECT_NE(trials.find("0.5,0,llm,NA,"), std::string::npos) << trials;
  std::string failures = testing::ReadFile(dir / "failures.csv");
  EXPECT_EQ(std::count(failures.begin(), failures.end(), '\n'), 3);
  EXPECT_NE(failures.find("connection refused"), std::string::npos);
  EXPECT_NE(testing::ReadFile(dir / "summary.txt").find("NA"), std::string::npos);
}

// True when every pair of systems compares the same way in both vectors.
bool SameOrder(const SystemScoreVector& a, const SystemScoreVector& b) {
  auto sign = [](double x) { return (x > 0) - (x < 0); };
  for (auto i = a.begin(); i != a.end(); ++i) {
    for (auto j = std::next(i); j != a.end(); ++j) {
      if (sign(i->second - j->second) !=
          sign(b.at(i->first) - b.at(j->first))) {
        return false;
      }
    }
  }
  return true;
}

TEST(RunSweep, ConstantZeroFallsBelowTheOracleWhenTheRankingChanges) {
  std::size_t changed = 0;
  for (std::uint64_t seed = 20; seed < 30; ++seed) {
    SweepInputs inputs = RandomInputs(seed);
    SweepConfig config = BaseConfig();
    config.fractions_retained = {0.1};
    config.trials = 1;
    ExperimentReport report = RunSweep(config, inputs);
    ASSERT_EQ(report.rows.size(), 2u);
    const double oracle = *report.rows[0].tau;
    const double constant = *report.rows[1].tau;
    SystemScoreVector scores;
    for (const SystemScoreRow& row : report.system_scores) {
      if (row.assessor == "constant:0") scores[row.system_tag] = row.score;
    }
    if (!SameOrder(scores, report.ground_truth)) {
      ++changed;
      EXPECT_LT(constant, oracle);
    } else {
      EXPECT_EQ(constant, oracle);
    }
  }
  EXPECT_GT(changed, 0u);
}

TEST(RunSweep, NoFractionsGivesHeaderOnlyReports) {
  SweepConfig config = BaseConfig();
  config.fractions_retained.clear();
  ExperimentReport report = RunSweep(config, RandomInputs(9));
  EXPECT_TRUE(report.rows.empty());
  EXPECT_TRUE(report.aggregates.empty());
  std::ostringstream trials, aggregates;
  WriteTrialsCsv(report, trials);
  WriteAggregatesCsv(report, aggregates);
  EXPECT_EQ(trials.str(), "fraction_retained,trial,assessor,tau,n_systems,seed\n");
  EXPECT_EQ(aggregates.str(), "fraction_retained,assessor,mean_tau,var_tau\n");
}

TEST(RunSweep, InputErrorsThrow) {
  SweepInputs inputs = RandomInputs(8, 3);
  SweepConfig config = BaseConfig();
  SweepInputs one = inputs;
  one.runs.resize(1);
  EXPECT_THROW(RunSweep(config, one), InvalidArgument);
  SweepInputs dup = inputs;
  dup.runs[1] = RunRanking(dup.runs[0].system_tag(), dup.runs[1].topics());
  EXPECT_THROW(RunSweep(config, dup), InvalidArgument);
  config.fractions_retained = {0.0};
  EXPECT_THROW(RunSweep(config, inputs), InvalidArgument);
  config = BaseConfig();
  config.assessors = {ParseAssessorSpec("llm")};
  EXPECT_THROW(RunSweep(config, inputs), InvalidArgument);  // no texts
}

TEST(LoadSweepConfig, ParsesKeysAndResolvesRelativePaths) {
  testing::TempDir dir;
  std::filesystem::create_directories(dir / "conf");
  testing::WriteFile(dir / "conf" / "sweep.json", R"({
    "qrels": "data/qrels.txt", "runs": "/abs/runs", "report_dir": "out",
    "fractions_retained": [0.25, 0.75], "trials": 5, "base_seed": 42,
    "assessors": ["oracle", "noisy:0.5"], "k": 20, "gain": "exponential",
    "zero_shot": true, "per_label_examples": 3, "model": "m",
    "endpoint": "http://localhost:1/v1/chat/completions", "temperature": 0.5,
    "max_retries": 4, "max_in_flight": 2, "threads": 3
  })");
  SweepConfig config = LoadSweepConfig(dir / "conf" / "sweep.json");
  EXPECT_EQ(config.qrels, dir / "conf" / "data/qrels.txt");
  EXPECT_EQ(config.runs, "/abs/runs");
  EXPECT_EQ(config.report_dir, dir / "conf" / "out");
  EXPECT_EQ(config.fractions_retained, (std::vector<double>{0.25, 0.75}));
  EXPECT_EQ(config.trials, 5);
  EXPECT_EQ(config.base_seed, 42u);
  ASSERT_EQ(config.assessors.size(), 2u);
  EXPECT_EQ(config.assessors[1].ToString(), "noisy:0.5");
  EXPECT_EQ(config.metric.cutoff_k, 20);
  EXPECT_EQ(config.metric.gain, Gain::kExponential);
  EXPECT_EQ(config.prompt_mode, PromptMode::kZeroShot);
  EXPECT_EQ(config.per_label_examples, 3u);
  EXPECT_EQ(config.llm.model_name, "m");
  EXPECT_EQ(config.llm.decoding.temperature, 0.5);
  EXPECT_EQ(config.llm.max_retries, 4);
  EXPECT_EQ(config.llm.max_in_flight, 2u);
  EXPECT_EQ(config.threads, 3u);
}

TEST(LoadSweepConfig, RejectsBadInput) {
  testing::TempDir dir;
  auto write = [&](const std::string& text) {
    testing::WriteFile(dir / "c.json", text);
    return dir / "c.json";
  };
  EXPECT_THROW(LoadSweepConfig(write(R"({"trails": 3})")), InvalidArgument);
  EXPECT_THROW(LoadSweepConfig(write(R"({"trials": "three"})")), InvalidArgument);
  EXPECT_THROW(LoadSweepConfig(write(R"({"trials": 0})")), InvalidArgument);
  EXPECT_THROW(LoadSweepConfig(write(R"({"fractions_retained": [1.5]})")), InvalidArgument);
  EXPECT_THROW(LoadSweepConfig(write(R"({"gain": "cubic"})")), InvalidArgument);
  EXPECT_THROW(LoadSweepConfig(write("[1, 2]")), InvalidArgument);
  EXPECT_THROW(LoadSweepConfig(write("{")), InvalidArgument);
  EXPECT_THROW(LoadSweepConfig(dir / "missing.json"), Error);
}

TEST(CompareSingleRun, ReportsBothEvaluationsAndTheirDifference) {
  JudgmentSet complete = testing::MakeQrels({{"1", "a", 3}, {"1", "b", 2}, {"1", "c", 0}});
  JudgmentSet patched = testing::MakeQrels({{"1", "a", 3}, {"1", "b", 0}, {"1", "c", 0}});
  RunRanking run = testing::MakeRun("r", {{"1", "c", 3.0}, {"1", "b", 2.0}, {"1", "a", 1.0}});
  MetricConfig metric;
  RunComparison c = CompareSingleRun(run, complete, patched, metric);
  // Complete: gains 0,2,3 against ideal 3,2. Patched: gains 0,0,3 against 3.
  double dcg_complete = 2.0 / std::log2(3.0) + 3.0 / 2.0;
  double idcg_complete = 3.0 + 2.0 / std::log2(3.0);
  EXPECT_NEAR(c.ground_truth.ndcg, dcg_complete / idcg_complete, 1e-12);
  EXPECT_NEAR(c.patched.ndcg, (3.0 / 2.0) / 3.0, 1e-12);
  EXPECT_NEAR(c.ground_truth.map, (1.0 / 2.0 + 2.0 / 3.0) / 2.0, 1e-12);
  EXPECT_NEAR(c.patched.map, 1.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(c.delta.ndcg, c.patched.ndcg - c.ground_truth.ndcg);
  std::ostringstream table;
  WriteComparisonTable(c, table);
  EXPECT_NE(table.str().find("r (GT)"), std::string::npos);
  EXPECT_NE(table.str().find("nDCG@10"), std::string::npos);
  EXPECT_NE(table.str().find("-0."), std::string::npos);
}

}  // namespace
}  // namespace holefill
