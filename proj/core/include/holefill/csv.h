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

#ifndef HOLEFILL_CSV_H_
#define HOLEFILL_CSV_H_

#include <initializer_list>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace holefill {

// Shortest decimal text that parses back to exactly `value`.
std::string FormatDouble(double value);

// Quotes a field that holds a separator or quote character.
std::string CsvEscape(std::string_view field);

void WriteCsvRow(std::ostream& out, std::initializer_list<std::string_view> fields);
void WriteCsvFields(std::ostream& out, const std::vector<std::string>& fields);

// Splits one CSV record (RFC 4180 quoting, no embedded newlines).
std::vector<std::string> ParseCsvLine(std::string_view line);

}  // namespace holefill

#endif  // HOLEFILL_CSV_H_
