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

#include "holefill/assessor.h"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <optional>
#include <ostream>
#include <thread>

#include <spdlog/spdlog.h>

#include "holefill/csv.h"
#include "holefill/errors.h"
#include "holefill/random.h"

namespace holefill {

std::string_view ToString(VerdictSource source) {
  switch (source) {
    case VerdictSource::kFresh:
      return "fresh";
    case VerdictSource::kCached:
      return "cached";
    case VerdictSource::kFallback:
      return "fallback";
  }
  return "unknown";
}

// --- oracle / constant / noisy ---------------------------------------------

OracleAssessor::OracleAssessor(std::shared_ptr<const JudgmentSet> truth)
    : truth_(std::move(truth)) {
  if (!truth_) throw InvalidArgument("oracle assessor needs ground truth");
}

Verdict OracleAssessor::Assess(const JudgmentKey& pair, const PromptText*) {
  auto grade = truth_->Find(pair.topic_id, pair.passage_id);
  if (!grade) throw OracleMiss(pair.topic_id, pair.passage_id);
  return {*grade, {}, VerdictSource::kFresh};
}

std::string ConstantAssessor::name() const {
  return "constant:" + std::to_string(grade_.value());
}

Verdict ConstantAssessor::Assess(const JudgmentKey&, const PromptText*) {
  return {grade_, {}, VerdictSource::kFresh};
}

NoisyAssessor::NoisyAssessor(std::shared_ptr<const JudgmentSet> truth,
                             double corruption_probability, std::uint64_t seed)
    : truth_(std::move(truth)),
      corruption_probability_(corruption_probability),
      seed_(seed) {
  if (!truth_) throw InvalidArgument("noisy assessor needs ground truth");
  if (!(corruption_probability_ >= 0.0 && corruption_probability_ <= 1.0)) {
    throw InvalidArgument("corruption probability must lie in [0, 1]");
  }
}

std::string NoisyAssessor::name() const {
  return "noisy:" + FormatDouble(corruption_probability_);
}

Verdict NoisyAssessor::Assess(const JudgmentKey& pair, const PromptText*) {
  auto grade = truth_->Find(pair.topic_id, pair.passage_id);
  if (!grade) throw OracleMiss(pair.topic_id, pair.passage_id);
  Rng coin(PairSeed(seed_, pair.topic_id, pair.passage_id));
  if (coin.Unit() < corruption_probability_) {
    return {RelevanceGrade::FromInt(0), {}, VerdictSource::kFresh};
  }
  return {*grade, {}, VerdictSource::kFresh};
}

// --- remote ----------------------------------------------------------------

RequestLimiter::RequestLimiter(std::size_t max_in_flight)
    : free_(std::max<std::size_t>(1, max_in_flight)) {}

void RequestLimiter::Acquire() {
  std::unique_lock lock(mutex_);
  available_.wait(lock, [this] { return free_ > 0; });
  --free_;
}

void RequestLimiter::Release() {
  {
    std::lock_guard lock(mutex_);
    ++free_;
  }
  available_.notify_one();
}

namespace {

class LimiterSlot {
 public:
  explicit LimiterSlot(RequestLimiter& limiter) : limiter_(limiter) {
    limiter_.Acquire();
  }
  ~LimiterSlot() { limiter_.Release(); }
  LimiterSlot(const LimiterSlot&) = delete;
  LimiterSlot& operator=(const LimiterSlot&) = delete;

 private:
  RequestLimiter& limiter_;
};

std::int64_t NowSeconds() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

RemoteLlmAssessor::RemoteLlmAssessor(RemoteLlmConfig config,
                                     std::shared_ptr<ChatClient> client,
                                     std::shared_ptr<ResponseCache> cache)
    : config_(std::move(config)),
      client_(std::move(client)),
      cache_(std::move(cache)),
      limiter_(config_.max_in_flight) {
  if (!client_) throw InvalidArgument("remote assessor needs a chat client");
  if (config_.model_name.empty()) throw InvalidArgument("remote assessor needs a model name");
  if (config_.decoding.temperature < 0.0) throw InvalidArgument("temperature must be >= 0");
  if (config_.max_retries < 0) throw InvalidArgument("retry budget must be >= 0");
}

Verdict RemoteLlmAssessor::Assess(const JudgmentKey& pair, const PromptText* prompt) {
  if (prompt == nullptr) throw InvalidArgument("remote assessor needs a prompt");
  const std::string hash = PromptHash(prompt->text);
  if (cache_) {
    if (auto record = cache_->Lookup(config_.model_name, hash)) {
      return {record->grade, record->raw_response, VerdictSource::kCached};
    }
  }

  const ChatRequest request{config_.model_name, prompt->text, config_.decoding};
  auto remember = [&](RelevanceGrade grade, const std::string& raw) {
    if (cache_) {
      cache_->Store({config_.model_name, hash, pair.topic_id, pair.passage_id, grade,
                     raw, NowSeconds()});
    }
  };

  std::optional<std::string> malformed;
  std::string transport_failure;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    std::string reply;
    try {
      LimiterSlot slot(limiter_);
      ++requests_sent_;
      reply = client_->Complete(request);
    } catch (const TransportError& e) {
      transport_failure = e.what();
      malformed.reset();
      if (attempt < config_.max_retries) {
        std::this_thread::sleep_for(config_.backoff * (1 << attempt));
      }
      continue;
    }
    try {
      RelevanceGrade grade = ParseGrade(reply);
      remember(grade, reply);
      return {grade, std::move(reply), VerdictSource::kFresh};
    } catch (const MalformedResponse&) {
      malformed = std::move(reply);
    }
  }

  if (!malformed) {
    throw TransportError("assessing (" + pair.topic_id + ", " + pair.passage_id +
                         ") failed after " + std::to_string(config_.max_retries + 1) +
                         " attempts: " + transport_failure);
  }
  spdlog::warn("no relevance category for ({}, {}) after {} attempts; using grade 0",
               pair.topic_id, pair.passage_id, config_.max_retries + 1);
  const RelevanceGrade fallback = RelevanceGrade::FromInt(0);
  remember(fallback, *malformed);
  return {fallback, std::move(*malformed), VerdictSource::kFallback};
}

// --- specs -----------------------------------------------------------------

std::string AssessorSpec::ToString() const {
  switch (kind) {
    case Kind::kRemoteLlm:
      return "llm";
    case Kind::kOracle:
      return "oracle";
    case Kind::kConstant:
      return "constant:" + std::to_string(constant_grade.value());
    case Kind::kNoisy:
      return "noisy:" + FormatDouble(corruption_probability);
  }
  return "unknown";
}

AssessorSpec ParseAssessorSpec(std::string_view text) {
  AssessorSpec spec;
  auto colon = text.find(':');
  std::string_view head = text.substr(0, colon);
  std::string_view arg =
      colon == std::string_view::npos ? std::string_view() : text.substr(colon + 1);
  auto bad = [&] {
    return InvalidArgument("unknown assessor '" + std::string(text) +
                           "' (expected llm, oracle, constant:<0-3> or noisy:<p>)");
  };

  if (head == "llm" && colon == std::string_view::npos) {
    spec.kind = AssessorSpec::Kind::kRemoteLlm;
  } else if (head == "oracle" && colon == std::string_view::npos) {
    spec.kind = AssessorSpec::Kind::kOracle;
  } else if (head == "constant") {
    int grade = -1;
    auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), grade);
    if (ec != std::errc() || ptr != arg.data() + arg.size()) throw bad();
    spec.kind = AssessorSpec::Kind::kConstant;
    spec.constant_grade = RelevanceGrade::FromInt(grade);
  } else if (head == "noisy") {
    double p = -1.0;
    auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), p);
    if (ec != std::errc() || ptr != arg.data() + arg.size()) throw bad();
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InvalidArgument("noisy corruption probability must lie in [0, 1]");
    }
    spec.kind = AssessorSpec::Kind::kNoisy;
    spec.corruption_probability = p;
  } else {
    throw bad();
  }
  return spec;
}

std::unique_ptr<Assessor> MakeAssessor(const AssessorSpec& spec,
                                       const AssessorContext& context) {
  switch (spec.kind) {
    case AssessorSpec::Kind::kOracle:
      return std::make_unique<OracleAssessor>(context.truth);
    case AssessorSpec::Kind::kConstant:
      return std::make_unique<ConstantAssessor>(spec.constant_grade);
    case AssessorSpec::Kind::kNoisy:
      return std::make_unique<NoisyAssessor>(context.truth,
                                             spec.corruption_probability, context.seed);
    case AssessorSpec::Kind::kRemoteLlm: {
      std::shared_ptr<ChatClient> client = context.client;
      if (!client) {
        if (context.llm.endpoint.empty()) {
          throw InvalidArgument("the llm assessor needs an endpoint");
        }
        const char* key = context.llm.api_key_env.empty()
                              ? nullptr
                              : std::getenv(context.llm.api_key_env.c_str());
        client = std::make_shared<HttpChatClient>(context.llm.endpoint,
                                                  key != nullptr ? key : "");
      }
      return std::make_unique<RemoteLlmAssessor>(context.llm, std::move(client),
                                                 context.cache);
    }
  }
  throw InvalidArgument("unknown assessor kind");
}

// --- patching --------------------------------------------------------------

PatchResult PatchJudgments(const JudgmentSet& retained, const HoleSet& holes,
                           Assessor& assessor, const PromptBuilder* prompts) {
  if (assessor.needs_prompt() && prompts == nullptr) {
    throw InvalidArgument("assessor " + assessor.name() + " needs a prompt builder");
  }
  std::vector<const JudgmentKey*> pairs;
  pairs.reserve(holes.size());
  for (const auto& [key, grade] : holes.entries()) {
    if (retained.Contains(key.topic_id, key.passage_id)) {
      throw InvalidArgument("hole (" + key.topic_id + ", " + key.passage_id +
                            ") is also a retained judgment");
    }
    pairs.push_back(&key);
  }

  std::vector<std::optional<Verdict>> verdicts(pairs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto work = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= pairs.size()) return;
      try {
        std::optional<PromptText> prompt;
        if (assessor.needs_prompt()) prompt = prompts->Build(*pairs[i]);
        verdicts[i] = assessor.Assess(*pairs[i], prompt ? &*prompt : nullptr);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
      }
    }
  };

  const std::size_t threads =
      std::min(std::max<std::size_t>(1, assessor.max_concurrency()), pairs.size());
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) workers.emplace_back(work);
  }
  if (first_error) std::rethrow_exception(first_error);

  PatchResult result{retained, {}};
  result.audit.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const Verdict& verdict = *verdicts[i];
    result.patched.Insert(pairs[i]->topic_id, pairs[i]->passage_id, verdict.grade);
    result.audit.push_back({*pairs[i], verdict.grade, verdict.source});
  }
  return result;
}

void WritePatchAudit(const std::vector<PatchAuditEntry>& audit, std::ostream& out) {
  WriteCsvRow(out, {"topic_id", "passage_id", "grade", "source"});
  for (const PatchAuditEntry& entry : audit) {
    WriteCsvRow(out, {entry.pair.topic_id, entry.pair.passage_id,
                      std::to_string(entry.grade.value()), ToString(entry.source)});
  }
  if (!out) throw Error("failed writing patch audit");
}

}  // namespace holefill
