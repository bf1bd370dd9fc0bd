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

// Runs the holefill binary end to end on small fixtures.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <random>

#include "holefill/holes.h"
#include "holefill/trec_io.h"
#include "test_util.h"

namespace holefill {
namespace {

struct Outcome {
  int status = -1;
  std::string out;
  std::string err;
};

void WriteRun(const RunRanking& run, const std::string& path) {
  std::string text;
  for (const auto& [topic, passages] : run.topics()) {
    for (const RankedPassage& p : passages) {
      text += topic + " Q0 " + p.passage_id + " " + std::to_string(p.rank) + " " +
              std::to_string(p.score) + " " + run.system_tag() + "\n";
    }
  }
  testing::WriteFile(path, text);
}

class Cli : public ::testing::Test {
 protected:
  Outcome Invoke(const std::string& args) {
    auto out = dir_ / "stdout.txt";
    auto err = dir_ / "stderr.txt";
    std::string command = std::string(HOLEFILL_CLI) + " " + args + " >" + out.string() +
                          " 2>" + err.string();
    int raw = std::system(command.c_str());
    Outcome outcome;
    outcome.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    outcome.out = testing::ReadFile(out);
    outcome.err = testing::ReadFile(err);
    return outcome;
  }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }
  std::string Fixture(const std::string& name) const {
    return (testing::TestDataDir() / "trec_eval" / name).string();
  }

  testing::TempDir dir_;
};

TEST_F(Cli, EvaluatePrintsScoresAndPerTopicCsv) {
  Outcome r = Invoke("evaluate --qrels " + Fixture("f1.qrels") + " --runs " +
                     Fixture("f1.run") + " --per-topic " + Path("topics.csv"));
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("nDCG@10"), std::string::npos);
  std::string csv = testing::ReadFile(Path("topics.csv"));
  EXPECT_NE(csv.find("0.6882615746603937"), std::string::npos) << csv;
}

TEST_F(Cli, SimulateThenPatchRestoresTheQrelsWithTheOracle) {
  ASSERT_EQ(Invoke("simulate --qrels " + Fixture("f3.qrels") +
                   " --fraction 0.5 --seed 9 --out-dir " + Path("sim"))
                .status,
            0);
  JudgmentSet complete = ReadQrelsFile(Fixture("f3.qrels"));
  JudgmentSet retained = ReadQrelsFile(Path("sim/retained.qrels"));
  JudgmentSet holes = ReadQrelsFile(Path("sim/holes.qrels"));
  EXPECT_EQ(retained.size() + holes.size(), complete.size());
  EXPECT_EQ(retained, SimulateHoles(complete, HoleSpec{0.5, 9, false}).retained);

  Outcome r = Invoke("patch --qrels " + Path("sim/retained.qrels") + " --holes " +
                     Path("sim/holes.csv") + " --assessor oracle --truth " +
                     Fixture("f3.qrels") + " --out " + Path("patched.qrels") + " --audit " +
                     Path("audit.csv"));
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(ReadQrelsFile(Path("patched.qrels")), complete);
  EXPECT_NE(testing::ReadFile(Path("audit.csv")).find("topic_id,passage_id,grade,source"),
            std::string::npos);

  r = Invoke("compare --run " + Fixture("f3.run") + " --qrels " + Fixture("f3.qrels") +
             " --patched " + Path("patched.qrels"));
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("+0.0000"), std::string::npos) << r.out;
}

TEST_F(Cli, SweepWritesTheReport) {
  std::mt19937_64 rng(21);
  JudgmentSet qrels = testing::RandomJudgments(rng, 10, 80);
  WriteQrelsFile(qrels, Path("q.qrels"));
  std::filesystem::create_directories(Path("runs"));
  for (const RunRanking& run : testing::RandomRuns(rng, qrels, 5, 20)) {
    WriteRun(run, Path("runs/" + run.system_tag() + ".run"));
  }
  Outcome r = Invoke("sweep --qrels " + Path("q.qrels") + " --runs " + Path("runs") +
                     " --assessor oracle --fraction 0.2 --fraction 0.6 --trials 2 --seed 5"
                     " --report-dir " + Path("report"));
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("mean_tau"), std::string::npos);
  std::string aggregates = testing::ReadFile(Path("report/aggregates.csv"));
  EXPECT_EQ(aggregates,
            "fraction_retained,assessor,mean_tau,var_tau\n0.2,oracle,1,0\n0.6,oracle,1,0\n");
}

TEST_F(Cli, ErrorsExitWithOneAndAMessage) {
  testing::WriteFile(Path("bad.qrels"), "101 0 p1\n");
  Outcome r = Invoke("evaluate --qrels " + Path("bad.qrels") + " --runs " + Fixture("f1.run"));
  EXPECT_EQ(r.status, 1);
  EXPECT_EQ(r.err.rfind("error: ", 0), 0u) << r.err;
  EXPECT_NE(r.err.find("line 1"), std::string::npos) << r.err;

  r = Invoke("patch --qrels " + Fixture("f1.qrels") + " --holes " + Fixture("f1.qrels") +
             " --assessor sometimes --out " + Path("x"));
  EXPECT_EQ(r.status, 1);
  EXPECT_EQ(r.err.rfind("error: ", 0), 0u) << r.err;
}

}  // namespace
}  // namespace holefill
