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

// TREC text formats: qrels, run files and id<TAB>text tables.
//
//   qrels:       <topic_id> <iteration> <passage_id> <grade>
//   run:         <topic_id> Q0 <passage_id> <rank> <score> <tag>
//   text table:  <id>\t<text>
//
// All readers accept LF and CRLF line endings and skip blank lines. Every
// parse error is a ParseError carrying the 1-based line number, and parsing
// is all-or-nothing.

#ifndef HOLEFILL_TREC_IO_H_
#define HOLEFILL_TREC_IO_H_

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace holefill {

// Four-level graded relevance: 0 irrelevant, 1 related, 2 highly relevant,
// 3 perfectly relevant.
class RelevanceGrade {
 public:
  static constexpr int kMin = 0;
  static constexpr int kMax = 3;

  constexpr RelevanceGrade() = default;

  // Throws InvalidArgument unless 0 <= value <= 3.
  static RelevanceGrade FromInt(int value);

  constexpr int value() const { return value_; }

  friend constexpr auto operator<=>(RelevanceGrade, RelevanceGrade) = default;

 private:
  constexpr explicit RelevanceGrade(int value) : value_(value) {}

  int value_ = 0;
};

// A (topic_id, passage_id) pair.
struct JudgmentKey {
  std::string topic_id;
  std::string passage_id;

  friend auto operator<=>(const JudgmentKey&, const JudgmentKey&) = default;
};

// True when `token` is non-empty and contains no whitespace.
bool IsValidToken(std::string_view token);

// Graded judgments keyed by (topic_id, passage_id). Iteration is ordered by
// topic_id, then passage_id.
class JudgmentSet {
 public:
  using PassageGrades = std::map<std::string, RelevanceGrade, std::less<>>;
  using TopicMap = std::map<std::string, PassageGrades, std::less<>>;

  JudgmentSet() = default;
  explicit JudgmentSet(std::string source_name)
      : source_name_(std::move(source_name)) {}

  // Throws InvalidArgument on a duplicate key or an invalid id token.
  void Insert(const std::string& topic_id, const std::string& passage_id,
              RelevanceGrade grade);
  // Removes the key if present; returns whether it was present. A topic
  // whose last entry is erased stays known, with no entries, so evaluation
  // still covers it.
  bool Erase(std::string_view topic_id, std::string_view passage_id);

  std::optional<RelevanceGrade> Find(std::string_view topic_id,
                                     std::string_view passage_id) const;
  bool Contains(std::string_view topic_id, std::string_view passage_id) const {
    return Find(topic_id, passage_id).has_value();
  }

  // Judged passages of one topic, or nullptr when the topic is unknown.
  const PassageGrades* Topic(std::string_view topic_id) const;
  const TopicMap& topics() const { return topics_; }

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  // All keys in (topic_id, passage_id) order.
  std::vector<JudgmentKey> Keys() const;
  // Number of entries per grade, indexed by grade value.
  std::array<std::size_t, 4> GradeCounts() const;

  const std::string& source_name() const { return source_name_; }
  void set_source_name(std::string name) { source_name_ = std::move(name); }

  // Equality compares entries only; the source name is informational.
  friend bool operator==(const JudgmentSet& a, const JudgmentSet& b) {
    return a.topics_ == b.topics_;
  }

 private:
  TopicMap topics_;
  std::size_t size_ = 0;
  std::string source_name_;
};

struct RankedPassage {
  std::string passage_id;
  double score = 0.0;
  int rank = 0;  // 1-based position in canonical order

  friend bool operator==(const RankedPassage&, const RankedPassage&) = default;
};

// One retrieval system's output. Each topic's list is in canonical order:
// descending score, ties broken by descending passage_id.
class RunRanking {
 public:
  using TopicMap = std::map<std::string, std::vector<RankedPassage>, std::less<>>;

  RunRanking() = default;
  RunRanking(std::string system_tag, TopicMap topics);

  const std::string& system_tag() const { return system_tag_; }
  const TopicMap& topics() const { return topics_; }
  const std::vector<RankedPassage>* Topic(std::string_view topic_id) const;

  friend bool operator==(const RunRanking&, const RunRanking&) = default;

 private:
  std::string system_tag_;
  TopicMap topics_;
};

// Sorts `passages` into canonical order and renumbers ranks from 1.
void Canonicalize(std::vector<RankedPassage>& passages);

// id -> text lookup for queries or passages.
class TextStore {
 public:
  // Throws InvalidArgument on duplicate id or text that is blank.
  void Insert(const std::string& id, std::string text);
  // nullptr when absent.
  const std::string* Find(std::string_view id) const;
  std::size_t size() const { return texts_.size(); }
  bool empty() const { return texts_.empty(); }

 private:
  std::map<std::string, std::string, std::less<>> texts_;
};

JudgmentSet ParseQrels(std::istream& in, std::string source_name = {});
void WriteQrels(const JudgmentSet& judgments, std::ostream& out);
RunRanking ParseRun(std::istream& in);
TextStore ParseTextTable(std::istream& in);

// File wrappers. Opening failures raise holefill::Error naming the path.
JudgmentSet ReadQrelsFile(const std::filesystem::path& path);
void WriteQrelsFile(const JudgmentSet& judgments,
                    const std::filesystem::path& path);
RunRanking ReadRunFile(const std::filesystem::path& path);
TextStore ReadTextTableFile(const std::filesystem::path& path);

// Reads every regular file in `dir` (sorted by file name) as a run. A path
// naming a single file yields one run.
std::vector<RunRanking> ReadRuns(const std::filesystem::path& path);

// Splits on runs of spaces and tabs. Exposed for the CSV/format helpers.
std::vector<std::string_view> SplitFields(std::string_view line);

}  // namespace holefill

#endif  // HOLEFILL_TREC_IO_H_
