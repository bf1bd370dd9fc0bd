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

#include "holefill/csv.h"

#include <array>
#include <charconv>
#include <ostream>

#include "holefill/errors.h"

namespace holefill {

std::string FormatDouble(double value) {
  std::array<char, 32> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buf.data(), ptr);
}

std::string CsvEscape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

namespace {

template <typename Range>
void WriteRow(std::ostream& out, const Range& fields) {
  bool first = true;
  for (const auto& field : fields) {
    if (!first) out << ',';
    out << CsvEscape(field);
    first = false;
  }
  out << '\n';
}

}  // namespace

void WriteCsvRow(std::ostream& out,
                 std::initializer_list<std::string_view> fields) {
  WriteRow(out, fields);
}

void WriteCsvFields(std::ostream& out, const std::vector<std::string>& fields) {
  WriteRow(out, fields);
}

std::vector<std::string> ParseCsvLine(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  if (quoted) throw InvalidArgument("unterminated quote in CSV line");
  fields.push_back(std::move(current));
  return fields;
}

}  // namespace holefill
