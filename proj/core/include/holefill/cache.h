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

// Persistent assessor response cache.
//
// The journal is JSON Lines, one record per line, appended with a single
// write(2) on an O_APPEND descriptor so concurrent writers never interleave
// partial records. On open, lines that fail to parse are skipped with a
// warning. Lookup returns the newest record for (model_name, prompt_hash).

#ifndef HOLEFILL_CACHE_H_
#define HOLEFILL_CACHE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "holefill/trec_io.h"

namespace holefill {

struct CacheRecord {
  std::string model_name;
  std::string prompt_hash;
  std::string topic_id;
  std::string passage_id;
  RelevanceGrade grade;
  std::string raw_response;
  std::int64_t timestamp = 0;  // seconds since the Unix epoch

  friend bool operator==(const CacheRecord&, const CacheRecord&) = default;
};

// Lowercase hex SHA-256 of the prompt bytes.
std::string PromptHash(std::string_view prompt_text);

std::string SerializeCacheRecord(const CacheRecord& record);
// std::nullopt for anything that is not a well-formed record.
std::optional<CacheRecord> DeserializeCacheRecord(std::string_view line);

class ResponseCache {
 public:
  // In-memory only; nothing is persisted.
  ResponseCache();
  // Loads `journal` if it exists and appends new records to it.
  explicit ResponseCache(const std::filesystem::path& journal);
  ~ResponseCache();

  ResponseCache(const ResponseCache&) = delete;
  ResponseCache& operator=(const ResponseCache&) = delete;

  std::optional<CacheRecord> Lookup(std::string_view model_name,
                                    std::string_view prompt_hash) const;
  // Thread-safe. Throws holefill::Error when the journal write fails.
  void Store(const CacheRecord& record);

  std::size_t size() const;
  // Journal lines ignored while loading.
  std::size_t skipped_lines() const { return skipped_lines_; }

 private:
  using Key = std::pair<std::string, std::string>;

  mutable std::mutex mutex_;
  std::map<Key, CacheRecord, std::less<>> records_;
  int fd_ = -1;
  std::size_t skipped_lines_ = 0;
};

}  // namespace holefill

#endif  // HOLEFILL_CACHE_H_
