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

#include "holefill/cache.h"

#include <fcntl.h>
#include <openssl/evp.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstring>
#include <fstream>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "holefill/errors.h"

namespace holefill {

using json = nlohmann::json;

std::string PromptHash(std::string_view prompt_text) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(prompt_text.data(), prompt_text.size(), digest.data(), &length,
                 EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xf];
  }
  return hex;
}

std::string SerializeCacheRecord(const CacheRecord& record) {
  json j = {
      {"model_name", record.model_name},
      {"prompt_hash", record.prompt_hash},
      {"topic_id", record.topic_id},
      {"passage_id", record.passage_id},
      {"grade", record.grade.value()},
      {"raw_response", record.raw_response},
      {"timestamp", record.timestamp},
  };
  // Invalid UTF-8 from a remote model is replaced rather than rejected.
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::optional<CacheRecord> DeserializeCacheRecord(std::string_view line) {
  try {
    json j = json::parse(line);
    CacheRecord record;
    record.model_name = j.at("model_name").get<std::string>();
    record.prompt_hash = j.at("prompt_hash").get<std::string>();
    record.topic_id = j.at("topic_id").get<std::string>();
    record.passage_id = j.at("passage_id").get<std::string>();
    record.grade = RelevanceGrade::FromInt(j.at("grade").get<int>());
    record.raw_response = j.at("raw_response").get<std::string>();
    record.timestamp = j.at("timestamp").get<std::int64_t>();
    return record;
  } catch (const json::exception&) {
    return std::nullopt;
  } catch (const InvalidArgument&) {
    return std::nullopt;
  }
}

ResponseCache::ResponseCache() = default;

ResponseCache::ResponseCache(const std::filesystem::path& journal) {
  if (std::ifstream in(journal, std::ios::binary); in) {
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
      ++line_number;
      if (line.empty()) continue;
      auto record = DeserializeCacheRecord(line);
      if (!record) {
        ++skipped_lines_;
        spdlog::warn("cache {}: skipping corrupt line {}", journal.string(),
                     line_number);
        continue;
      }
      Key key{record->model_name, record->prompt_hash};
      records_.insert_or_assign(std::move(key), std::move(*record));
    }
  }
  fd_ = ::open(journal.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) {
    throw Error("cannot open cache journal " + journal.string() + ": " +
                std::strerror(errno));
  }
}

ResponseCache::~ResponseCache() {
  if (fd_ >= 0) ::close(fd_);
}

std::optional<CacheRecord> ResponseCache::Lookup(
    std::string_view model_name, std::string_view prompt_hash) const {
  std::lock_guard lock(mutex_);
  auto it = records_.find(std::make_pair(std::string(model_name),
                                         std::string(prompt_hash)));
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

void ResponseCache::Store(const CacheRecord& record) {
  std::string line = SerializeCacheRecord(record);
  line += '\n';
  std::lock_guard lock(mutex_);
  if (fd_ >= 0) {
    std::size_t written = 0;
    while (written < line.size()) {
      ssize_t n = ::write(fd_, line.data() + written, line.size() - written);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw Error(std::string("cache journal write failed: ") + std::strerror(errno));
      }
      written += static_cast<std::size_t>(n);
    }
  }
  records_.insert_or_assign(Key{record.model_name, record.prompt_hash}, record);
}

std::size_t ResponseCache::size() const {
  std::lock_guard lock(mutex_);
  return records_.size();
}

}  // namespace holefill
