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

#include "holefill/trec_io.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "holefill/errors.h"

namespace holefill {

namespace {

bool IsBlank(char c) { return c == ' ' || c == '\t'; }

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && IsSpace(s.front())) s.remove_prefix(1);
  while (!s.empty() && IsSpace(s.back())) s.remove_suffix(1);
  return s;
}

// Calls `fn(line_number, line)` for every non-blank line, with any trailing
// CR removed.
template <typename Fn>
void ForEachLine(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    fn(line_number, std::string_view(line));
  }
  if (in.bad()) throw Error("read failure after line " + std::to_string(line_number));
}

template <typename Int>
bool ParseInt(std::string_view field, Int& out) {
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool ParseScore(std::string_view field, double& out) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::ifstream OpenInput(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

}  // namespace

RelevanceGrade RelevanceGrade::FromInt(int value) {
  if (value < kMin || value > kMax) {
    throw InvalidArgument("relevance grade " + std::to_string(value) +
                          " is outside 0..3");
  }
  return RelevanceGrade(value);
}

bool IsValidToken(std::string_view token) {
  return !token.empty() &&
         std::none_of(token.begin(), token.end(), [](char c) { return IsSpace(c); });
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && IsBlank(line[i])) ++i;
    if (i == line.size()) break;
    std::size_t start = i;
    while (i < line.size() && !IsBlank(line[i])) ++i;
    fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

// --- JudgmentSet -----------------------------------------------------------

void JudgmentSet::Insert(const std::string& topic_id,
                         const std::string& passage_id, RelevanceGrade grade) {
  if (!IsValidToken(topic_id) || !IsValidToken(passage_id)) {
    throw InvalidArgument("ids must be non-empty and whitespace-free");
  }
  auto& passages = topics_[topic_id];
  auto [it, inserted] = passages.emplace(passage_id, grade);
  if (!inserted) {
    throw InvalidArgument("duplicate judgment for (" + topic_id + ", " +
                          passage_id + ")");
  }
  ++size_;
}

bool JudgmentSet::Erase(std::string_view topic_id, std::string_view passage_id) {
  auto topic = topics_.find(topic_id);
  if (topic == topics_.end()) return false;
  auto passage = topic->second.find(passage_id);
  if (passage == topic->second.end()) return false;
  topic->second.erase(passage);
  --size_;
  return true;
}

std::optional<RelevanceGrade> JudgmentSet::Find(
    std::string_view topic_id, std::string_view passage_id) const {
  const PassageGrades* passages = Topic(topic_id);
  if (passages == nullptr) return std::nullopt;
  auto it = passages->find(passage_id);
  if (it == passages->end()) return std::nullopt;
  return it->second;
}

const JudgmentSet::PassageGrades* JudgmentSet::Topic(
    std::string_view topic_id) const {
  auto it = topics_.find(topic_id);
  return it == topics_.end() ? nullptr : &it->second;
}

std::vector<JudgmentKey> JudgmentSet::Keys() const {
  std::vector<JudgmentKey> keys;
  keys.reserve(size_);
  for (const auto& [topic, passages] : topics_) {
    for (const auto& [passage, grade] : passages) {
      keys.push_back({topic, passage});
    }
  }
  return keys;
}

std::array<std::size_t, 4> JudgmentSet::GradeCounts() const {
  std::array<std::size_t, 4> counts{};
  for (const auto& [topic, passages] : topics_) {
    for (const auto& [passage, grade] : passages) ++counts[grade.value()];
  }
  return counts;
}

// --- RunRanking ------------------------------------------------------------

void Canonicalize(std::vector<RankedPassage>& passages) {
  std::sort(passages.begin(), passages.end(),
            [](const RankedPassage& a, const RankedPassage& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.passage_id > b.passage_id;
            });
  for (std::size_t i = 0; i < passages.size(); ++i) {
    passages[i].rank = static_cast<int>(i + 1);
  }
}

RunRanking::RunRanking(std::string system_tag, TopicMap topics)
    : system_tag_(std::move(system_tag)), topics_(std::move(topics)) {
  for (auto& [topic, passages] : topics_) Canonicalize(passages);
}

const std::vector<RankedPassage>* RunRanking::Topic(
    std::string_view topic_id) const {
  auto it = topics_.find(topic_id);
  return it == topics_.end() ? nullptr : &it->second;
}

// --- TextStore -------------------------------------------------------------

void TextStore::Insert(const std::string& id, std::string text) {
  if (id.empty()) throw InvalidArgument("empty text id");
  if (Trim(text).empty()) throw InvalidArgument("empty text for id '" + id + "'");
  if (!texts_.emplace(id, std::move(text)).second) {
    throw InvalidArgument("duplicate text id '" + id + "'");
  }
}

const std::string* TextStore::Find(std::string_view id) const {
  auto it = texts_.find(id);
  return it == texts_.end() ? nullptr : &it->second;
}

// --- parsers ---------------------------------------------------------------

JudgmentSet ParseQrels(std::istream& in, std::string source_name) {
  JudgmentSet judgments(std::move(source_name));
  ForEachLine(in, [&](std::size_t line_number, std::string_view line) {
    auto fields = SplitFields(line);
    if (fields.size() != 4) {
      throw ParseError(line_number, "expected 4 fields, found " +
                                        std::to_string(fields.size()));
    }
    int grade = 0;
    if (!ParseInt(fields[3], grade) || grade < RelevanceGrade::kMin ||
        grade > RelevanceGrade::kMax) {
      throw ParseError(line_number, "grade '" + std::string(fields[3]) +
                                        "' is not one of 0,1,2,3");
    }
    std::string topic(fields[0]);
    std::string passage(fields[2]);
    if (judgments.Contains(topic, passage)) {
      throw ParseError(line_number, "duplicate judgment for (" + topic + ", " +
                                        passage + ")");
    }
    judgments.Insert(topic, passage, RelevanceGrade::FromInt(grade));
  });
  return judgments;
}

void WriteQrels(const JudgmentSet& judgments, std::ostream& out) {
  for (const auto& [topic, passages] : judgments.topics()) {
    for (const auto& [passage, grade] : passages) {
      out << topic << " 0 " << passage << ' ' << grade.value() << '\n';
    }
  }
  if (!out) throw Error("failed writing qrels");
}

RunRanking ParseRun(std::istream& in) {
  RunRanking::TopicMap topics;
  std::map<std::string, std::map<std::string, std::size_t, std::less<>>,
           std::less<>>
      first_seen;
  std::optional<std::string> tag;
  ForEachLine(in, [&](std::size_t line_number, std::string_view line) {
    auto fields = SplitFields(line);
    if (fields.size() != 6) {
      throw ParseError(line_number, "expected 6 fields, found " +
                                        std::to_string(fields.size()));
    }
    long long rank = 0;
    if (!ParseInt(fields[3], rank)) {
      throw ParseError(line_number,
                       "rank '" + std::string(fields[3]) + "' is not an integer");
    }
    double score = 0.0;
    if (!ParseScore(fields[4], score)) {
      throw ParseError(line_number,
                       "score '" + std::string(fields[4]) + "' is not a number");
    }
    if (!tag) {
      tag = std::string(fields[5]);
    } else if (*tag != fields[5]) {
      throw ParseError(line_number, "run tag '" + std::string(fields[5]) +
                                        "' differs from '" + *tag + "'");
    }
    std::string topic(fields[0]);
    std::string passage(fields[2]);
    auto& seen = first_seen[topic];
    if (auto it = seen.find(passage); it != seen.end()) {
      throw ParseError(line_number, "passage " + passage +
                                        " already ranked for topic " + topic +
                                        " on line " + std::to_string(it->second));
    }
    seen.emplace(passage, line_number);
    topics[topic].push_back({std::move(passage), score, 0});
  });
  return RunRanking(tag.value_or(std::string()), std::move(topics));
}

TextStore ParseTextTable(std::istream& in) {
  TextStore store;
  ForEachLine(in, [&](std::size_t line_number, std::string_view line) {
    auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw ParseError(line_number, "missing tab separator");
    }
    std::string id(line.substr(0, tab));
    std::string text(line.substr(tab + 1));
    if (!IsValidToken(id)) throw ParseError(line_number, "invalid id");
    if (Trim(text).empty()) {
      throw ParseError(line_number, "empty text for id '" + id + "'");
    }
    if (store.Find(id) != nullptr) {
      throw ParseError(line_number, "duplicate id '" + id + "'");
    }
    store.Insert(id, std::move(text));
  });
  return store;
}

// --- files -----------------------------------------------------------------

JudgmentSet ReadQrelsFile(const std::filesystem::path& path) {
  auto in = OpenInput(path);
  return ParseQrels(in, path.filename().string());
}

void WriteQrelsFile(const JudgmentSet& judgments,
                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  WriteQrels(judgments, out);
}

RunRanking ReadRunFile(const std::filesystem::path& path) {
  auto in = OpenInput(path);
  try {
    return ParseRun(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + e.detail());
  }
}

TextStore ReadTextTableFile(const std::filesystem::path& path) {
  auto in = OpenInput(path);
  return ParseTextTable(in);
}

std::vector<RunRanking> ReadRuns(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(path)) return {ReadRunFile(path)};
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<RunRanking> runs;
  runs.reserve(files.size());
  for (const auto& file : files) runs.push_back(ReadRunFile(file));
  return runs;
}

}  // namespace holefill
