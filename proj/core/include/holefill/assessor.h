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

// Relevance assessors and hole patching.
//
// Patching keeps every retained judgment and gives each hole the grade its
// assessor returns:
//
//   patched(q) = retained(q)     if q is a judged pair
//              = assess(q)       if q is a hole
//
// Backends: a remote chat-completions model, the ground truth itself (oracle),
// a constant grade, and a noisy oracle that replaces the truth by 0 with a
// fixed probability.

#ifndef HOLEFILL_ASSESSOR_H_
#define HOLEFILL_ASSESSOR_H_

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "holefill/cache.h"
#include "holefill/holes.h"
#include "holefill/llm_client.h"
#include "holefill/prompting.h"
#include "holefill/trec_io.h"

namespace holefill {

enum class VerdictSource { kFresh, kCached, kFallback };

std::string_view ToString(VerdictSource source);

struct Verdict {
  RelevanceGrade grade;
  std::string raw_response;
  VerdictSource source = VerdictSource::kFresh;
};

class Assessor {
 public:
  virtual ~Assessor() = default;

  // Label used in reports, e.g. "oracle", "constant:0", "noisy:0.25".
  virtual std::string name() const = 0;
  // Whether Assess() reads the prompt. Prompt-free backends accept nullptr.
  virtual bool needs_prompt() const { return false; }
  // Number of Assess() calls worth running at once.
  virtual std::size_t max_concurrency() const { return 1; }

  // Must be safe to call concurrently.
  virtual Verdict Assess(const JudgmentKey& pair, const PromptText* prompt) = 0;
};

class OracleAssessor : public Assessor {
 public:
  explicit OracleAssessor(std::shared_ptr<const JudgmentSet> truth);

  std::string name() const override { return "oracle"; }
  // Throws OracleMiss for pairs without truth.
  Verdict Assess(const JudgmentKey& pair, const PromptText* prompt) override;

 private:
  std::shared_ptr<const JudgmentSet> truth_;
};

class ConstantAssessor : public Assessor {
 public:
  explicit ConstantAssessor(RelevanceGrade grade) : grade_(grade) {}

  std::string name() const override;
  Verdict Assess(const JudgmentKey& pair, const PromptText* prompt) override;

 private:
  RelevanceGrade grade_;
};

// Returns the true grade, or 0 with probability `corruption_probability`.
// The coin for a pair depends only on (seed, pair), so the corrupted set
// grows monotonically with the probability for a fixed seed.
class NoisyAssessor : public Assessor {
 public:
  NoisyAssessor(std::shared_ptr<const JudgmentSet> truth,
                double corruption_probability, std::uint64_t seed);

  std::string name() const override;
  Verdict Assess(const JudgmentKey& pair, const PromptText* prompt) override;

 private:
  std::shared_ptr<const JudgmentSet> truth_;
  double corruption_probability_;
  std::uint64_t seed_;
};

struct RemoteLlmConfig {
  std::string model_name;
  std::string endpoint;  // full URL of the chat-completions route
  std::string api_key_env = "OPENAI_API_KEY";
  Decoding decoding;
  // Extra attempts after the first one, for malformed replies and transport
  // failures alike.
  int max_retries = 2;
  std::size_t max_in_flight = 4;
  std::chrono::milliseconds backoff{500};  // doubled on every retry
};

// Counting gate on concurrent requests.
class RequestLimiter {
 public:
  explicit RequestLimiter(std::size_t max_in_flight);

  void Acquire();
  void Release();

 private:
  std::mutex mutex_;
  std::condition_variable available_;
  std::size_t free_;
};

class RemoteLlmAssessor : public Assessor {
 public:
  // `cache` may be null. The limiter bounds requests across every thread
  // sharing this assessor.
  RemoteLlmAssessor(RemoteLlmConfig config, std::shared_ptr<ChatClient> client,
                    std::shared_ptr<ResponseCache> cache);

  std::string name() const override { return "llm:" + config_.model_name; }
  bool needs_prompt() const override { return true; }
  std::size_t max_concurrency() const override { return config_.max_in_flight; }

  // Cached replies are returned without a request. Malformed replies are
  // retried; if the final attempt is still malformed the verdict falls back
  // to grade 0. A final transport failure throws TransportError.
  Verdict Assess(const JudgmentKey& pair, const PromptText* prompt) override;

  std::size_t requests_sent() const { return requests_sent_.load(); }
  const RemoteLlmConfig& config() const { return config_; }

 private:
  RemoteLlmConfig config_;
  std::shared_ptr<ChatClient> client_;
  std::shared_ptr<ResponseCache> cache_;
  RequestLimiter limiter_;
  std::atomic<std::size_t> requests_sent_{0};
};

// Parsed form of the command-line assessor selector:
//   llm | oracle | constant:<grade> | noisy:<probability>
struct AssessorSpec {
  enum class Kind { kRemoteLlm, kOracle, kConstant, kNoisy };

  Kind kind = Kind::kOracle;
  RelevanceGrade constant_grade;
  double corruption_probability = 0.0;

  // Canonical text form; round-trips through ParseAssessorSpec.
  std::string ToString() const;
};

AssessorSpec ParseAssessorSpec(std::string_view text);

// What a spec needs to become an assessor. The oracle and noisy backends
// read `truth`; the remote one reads the llm fields.
struct AssessorContext {
  std::shared_ptr<const JudgmentSet> truth;
  std::uint64_t seed = 0;
  RemoteLlmConfig llm;
  std::shared_ptr<ChatClient> client;  // built from llm.endpoint when null
  std::shared_ptr<ResponseCache> cache;
};

std::unique_ptr<Assessor> MakeAssessor(const AssessorSpec& spec,
                                       const AssessorContext& context);

struct PatchAuditEntry {
  JudgmentKey pair;
  RelevanceGrade grade;
  VerdictSource source = VerdictSource::kFresh;
};

struct PatchResult {
  JudgmentSet patched;
  std::vector<PatchAuditEntry> audit;  // one per hole, in pair order
};

// Fills every hole with the assessor's verdict. `prompts` may be null for
// backends that do not need prompts. Holes are assessed on up to
// assessor.max_concurrency() threads; the result does not depend on
// completion order. The first assess error stops scheduling and is rethrown
// once in-flight work drains; verdicts already obtained stay in the cache.
PatchResult PatchJudgments(const JudgmentSet& retained, const HoleSet& holes,
                           Assessor& assessor, const PromptBuilder* prompts);

// CSV `topic_id,passage_id,grade,source`.
void WritePatchAudit(const std::vector<PatchAuditEntry>& audit, std::ostream& out);

}  // namespace holefill

#endif  // HOLEFILL_ASSESSOR_H_
