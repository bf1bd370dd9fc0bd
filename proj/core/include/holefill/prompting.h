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

// Assessor prompts and answer parsing.
//
// The template carries three placeholders: {examples}, {query} and
// {passage}. In few-shot mode {examples} expands to a lead-in line followed
// by one block per example:
//
//   ###
//
//   Query: <query text>
//   Passage: <passage text>
//   Relevance category: <grade>
//
// In zero-shot mode the placeholder line and the blank line after it are
// dropped. Substitution is a single left-to-right pass, so placeholder-like
// text inside queries or passages is never expanded.

#ifndef HOLEFILL_PROMPTING_H_
#define HOLEFILL_PROMPTING_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "holefill/trec_io.h"

namespace holefill {

struct Example {
  std::string query_text;
  std::string passage_text;
  RelevanceGrade grade;

  friend bool operator==(const Example&, const Example&) = default;
};

// In-context examples: per_label_count of each grade, ordered by ascending
// grade and then by draw order.
struct ExampleSet {
  std::vector<Example> examples;
  std::size_t per_label_count = 0;

  friend bool operator==(const ExampleSet&, const ExampleSet&) = default;
};

enum class PromptMode { kFewShot, kZeroShot };

struct PromptText {
  std::string text;
  PromptMode mode = PromptMode::kZeroShot;
};

inline constexpr char kExamplesLeadIn[] =
    "Following are some of the examples of relevance categorizations for "
    "different categories:";

class PromptTemplate {
 public:
  // The built-in assessor instructions.
  static const PromptTemplate& Default();
  // Throws holefill::Error when unreadable, InvalidArgument when malformed.
  static PromptTemplate FromFile(const std::filesystem::path& path);

  // Requires exactly one {query} and one {passage}, and at most one
  // {examples}.
  explicit PromptTemplate(std::string text);

  const std::string& text() const { return text_; }
  bool has_examples_slot() const { return has_examples_slot_; }

 private:
  std::string text_;
  bool has_examples_slot_ = false;
};

// Renders the few-shot block that replaces {examples}.
std::string FormatExamples(const ExampleSet& examples);

// Few-shot when `examples` is non-null, zero-shot otherwise. Pure and
// byte-deterministic. Throws InvalidArgument on empty texts or when few-shot
// is requested of a template without an {examples} slot.
PromptText BuildPrompt(std::string_view query_text, std::string_view passage_text,
                       const ExampleSet* examples,
                       const PromptTemplate& tmpl = PromptTemplate::Default());

// Extracts the relevance category from an assessor reply.
//
// Non-empty lines are scanned from last to first; the first whose trimmed
// content is exactly 0, 1, 2 or 3 (optionally followed by '.') wins.
// Otherwise the last "category: <g>" anywhere in the text is used. Throws
// MalformedResponse when neither is found.
RelevanceGrade ParseGrade(std::string_view response);

// Per-grade candidate lists drawn from judged (non-hole) pairs. Holds
// references to the text stores, which must outlive the pool.
class ExamplePool {
 public:
  ExamplePool(const JudgmentSet& judged, const TextStore& queries,
              const TextStore& passages);

  // Draws `per_label` examples of every grade uniformly without replacement,
  // never selecting `exclude`. Throws InsufficientExamples naming the first
  // short grade, or MissingText naming an id without text.
  ExampleSet Sample(std::size_t per_label, std::uint64_t seed,
                    const std::optional<JudgmentKey>& exclude = std::nullopt) const;

 private:
  std::array<std::vector<JudgmentKey>, 4> by_grade_;
  const TextStore* queries_;
  const TextStore* passages_;
};

ExampleSet SampleExamples(const JudgmentSet& retained, const TextStore& queries,
                          const TextStore& passages, std::size_t per_label,
                          std::uint64_t seed,
                          const std::optional<JudgmentKey>& exclude = std::nullopt);

struct PromptOptions {
  PromptMode mode = PromptMode::kFewShot;
  std::size_t per_label_examples = 2;
  std::uint64_t seed = 0;
  // Reuse one example set for every pair instead of drawing one per pair.
  bool fixed_examples = false;
};

// Builds the prompt for any (topic, passage) pair. Examples for a pair are
// drawn with PairSeed(seed, topic, passage), so prompts do not depend on the
// order pairs are visited. References must outlive the builder.
class PromptBuilder {
 public:
  PromptBuilder(const JudgmentSet& retained, const TextStore& queries,
                const TextStore& passages, PromptTemplate tmpl,
                PromptOptions options);

  PromptText Build(const JudgmentKey& pair) const;

  const PromptTemplate& prompt_template() const { return template_; }
  const PromptOptions& options() const { return options_; }

 private:
  const TextStore* queries_;
  const TextStore* passages_;
  ExamplePool pool_;
  PromptTemplate template_;
  PromptOptions options_;
  std::optional<ExampleSet> fixed_;
};

}  // namespace holefill

#endif  // HOLEFILL_PROMPTING_H_
