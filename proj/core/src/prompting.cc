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

#include "holefill/prompting.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "holefill/default_template.h"
#include "holefill/errors.h"
#include "holefill/random.h"

namespace holefill {

namespace {

constexpr std::string_view kExamplesSlot = "{examples}";
constexpr std::string_view kQuerySlot = "{query}";
constexpr std::string_view kPassageSlot = "{passage}";

std::size_t CountOccurrences(std::string_view text, std::string_view needle) {
  std::size_t count = 0;
  for (auto pos = text.find(needle); pos != std::string_view::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

std::string_view TrimView(std::string_view s) {
  auto space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && space(s.front())) s.remove_prefix(1);
  while (!s.empty() && space(s.back())) s.remove_suffix(1);
  return s;
}

std::optional<int> BareCategory(std::string_view line) {
  line = TrimView(line);
  if (!line.empty() && line.back() == '.') line.remove_suffix(1);
  if (line.size() == 1 && line[0] >= '0' && line[0] <= '3') return line[0] - '0';
  return std::nullopt;
}

// Last "category: <g>" (case-insensitive, any spacing after the colon)
// whose digit is not followed by another digit.
std::optional<int> LabelledCategory(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  constexpr std::string_view kLabel = "category:";
  std::optional<int> found;
  for (auto pos = lower.find(kLabel); pos != std::string::npos;
       pos = lower.find(kLabel, pos + 1)) {
    std::size_t i = pos + kLabel.size();
    while (i < lower.size() && (lower[i] == ' ' || lower[i] == '\t')) ++i;
    if (i < lower.size() && lower[i] >= '0' && lower[i] <= '3' &&
        (i + 1 == lower.size() || !std::isdigit(static_cast<unsigned char>(lower[i + 1])))) {
      found = lower[i] - '0';
    }
  }
  return found;
}

}  // namespace

const PromptTemplate& PromptTemplate::Default() {
  static const PromptTemplate kDefault{std::string(internal::kDefaultPromptTemplate)};
  return kDefault;
}

PromptTemplate PromptTemplate::FromFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open prompt template " + path.string());
  std::ostringstream contents;
  contents << in.rdbuf();
  return PromptTemplate(contents.str());
}

PromptTemplate::PromptTemplate(std::string text) : text_(std::move(text)) {
  if (CountOccurrences(text_, kQuerySlot) != 1 ||
      CountOccurrences(text_, kPassageSlot) != 1) {
    throw InvalidArgument(
        "prompt template needs exactly one {query} and one {passage}");
  }
  const std::size_t example_slots = CountOccurrences(text_, kExamplesSlot);
  if (example_slots > 1) {
    throw InvalidArgument("prompt template has more than one {examples}");
  }
  has_examples_slot_ = example_slots == 1;
}

std::string FormatExamples(const ExampleSet& examples) {
  std::string out = kExamplesLeadIn;
  for (const Example& example : examples.examples) {
    out += "\n\n###\n\nQuery: ";
    out += example.query_text;
    out += "\nPassage: ";
    out += example.passage_text;
    out += "\nRelevance category: ";
    out += std::to_string(example.grade.value());
  }
  return out;
}

PromptText BuildPrompt(std::string_view query_text, std::string_view passage_text,
                       const ExampleSet* examples, const PromptTemplate& tmpl) {
  if (TrimView(query_text).empty() || TrimView(passage_text).empty()) {
    throw InvalidArgument("query and passage text must be non-empty");
  }
  if (examples != nullptr && !tmpl.has_examples_slot()) {
    throw InvalidArgument("few-shot prompt requested but the template has no {examples}");
  }

  PromptText prompt;
  prompt.mode = examples != nullptr ? PromptMode::kFewShot : PromptMode::kZeroShot;
  const std::string block = examples != nullptr ? FormatExamples(*examples) : "";

  std::string_view text = tmpl.text();
  std::string& out = prompt.text;
  out.reserve(text.size() + block.size() + query_text.size() + passage_text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    std::string_view rest = text.substr(i);
    if (rest.starts_with(kExamplesSlot)) {
      i += kExamplesSlot.size();
      if (examples != nullptr) {
        out += block;
      } else if (text.substr(i).starts_with("\n\n")) {
        i += 2;
      }
    } else if (rest.starts_with(kQuerySlot)) {
      out += query_text;
      i += kQuerySlot.size();
    } else if (rest.starts_with(kPassageSlot)) {
      out += passage_text;
      i += kPassageSlot.size();
    } else {
      out += text[i++];
    }
  }
  return prompt;
}

RelevanceGrade ParseGrade(std::string_view response) {
  std::string_view rest = response;
  while (!rest.empty()) {
    auto newline = rest.rfind('\n');
    std::string_view line =
        newline == std::string_view::npos ? rest : rest.substr(newline + 1);
    if (auto grade = BareCategory(line)) return RelevanceGrade::FromInt(*grade);
    if (newline == std::string_view::npos) break;
    rest = rest.substr(0, newline);
  }
  if (auto grade = LabelledCategory(response)) return RelevanceGrade::FromInt(*grade);
  throw MalformedResponse(std::string(response));
}

ExamplePool::ExamplePool(const JudgmentSet& judged, const TextStore& queries,
                         const TextStore& passages)
    : queries_(&queries), passages_(&passages) {
  for (const auto& [topic, grades] : judged.topics()) {
    for (const auto& [passage, grade] : grades) {
      by_grade_[grade.value()].push_back({topic, passage});
    }
  }
}

ExampleSet ExamplePool::Sample(std::size_t per_label, std::uint64_t seed,
                               const std::optional<JudgmentKey>& exclude) const {
  if (per_label == 0) throw InvalidArgument("per-label example count must be positive");

  std::array<std::vector<const JudgmentKey*>, 4> candidates;
  for (int g = 0; g <= RelevanceGrade::kMax; ++g) {
    for (const JudgmentKey& key : by_grade_[g]) {
      if (!exclude || key != *exclude) candidates[g].push_back(&key);
    }
    if (candidates[g].size() < per_label) {
      throw InsufficientExamples(g, candidates[g].size(), per_label);
    }
  }

  Rng rng(seed);
  ExampleSet set;
  set.per_label_count = per_label;
  for (int g = 0; g <= RelevanceGrade::kMax; ++g) {
    for (std::size_t index : rng.SampleIndices(candidates[g].size(), per_label)) {
      const JudgmentKey& key = *candidates[g][index];
      const std::string* query = queries_->Find(key.topic_id);
      if (query == nullptr) throw MissingText(key.topic_id);
      const std::string* passage = passages_->Find(key.passage_id);
      if (passage == nullptr) throw MissingText(key.passage_id);
      set.examples.push_back({*query, *passage, RelevanceGrade::FromInt(g)});
    }
  }
  return set;
}

ExampleSet SampleExamples(const JudgmentSet& retained, const TextStore& queries,
                          const TextStore& passages, std::size_t per_label,
                          std::uint64_t seed,
                          const std::optional<JudgmentKey>& exclude) {
  return ExamplePool(retained, queries, passages).Sample(per_label, seed, exclude);
}

PromptBuilder::PromptBuilder(const JudgmentSet& retained, const TextStore& queries,
                             const TextStore& passages, PromptTemplate tmpl,
                             PromptOptions options)
    : queries_(&queries),
      passages_(&passages),
      pool_(retained, queries, passages),
      template_(std::move(tmpl)),
      options_(options) {
  if (options_.mode == PromptMode::kFewShot && options_.fixed_examples) {
    fixed_ = pool_.Sample(options_.per_label_examples, options_.seed);
  }
}

PromptText PromptBuilder::Build(const JudgmentKey& pair) const {
  const std::string* query = queries_->Find(pair.topic_id);
  if (query == nullptr) throw MissingText(pair.topic_id);
  const std::string* passage = passages_->Find(pair.passage_id);
  if (passage == nullptr) throw MissingText(pair.passage_id);

  if (options_.mode == PromptMode::kZeroShot) {
    return BuildPrompt(*query, *passage, nullptr, template_);
  }
  if (fixed_) return BuildPrompt(*query, *passage, &*fixed_, template_);
  const ExampleSet examples =
      pool_.Sample(options_.per_label_examples,
                   PairSeed(options_.seed, pair.topic_id, pair.passage_id), pair);
  return BuildPrompt(*query, *passage, &examples, template_);
}

}  // namespace holefill
