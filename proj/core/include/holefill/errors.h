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

#ifndef HOLEFILL_ERRORS_H_
#define HOLEFILL_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace holefill {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A text-format input could not be parsed. `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message),
        line_(line),
        detail_(message) {}

  std::size_t line() const { return line_; }
  // The message without the line prefix.
  const std::string& detail() const { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

// An argument violated a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Not enough judged pairs to draw in-context examples for some grade.
class InsufficientExamples : public Error {
 public:
  InsufficientExamples(int grade, std::size_t available, std::size_t needed)
      : Error("need " + std::to_string(needed) + " examples of grade " +
              std::to_string(grade) + " but only " +
              std::to_string(available) + " are available"),
        grade_(grade) {}

  int grade() const { return grade_; }

 private:
  int grade_;
};

// A query or passage id has no entry in its text table.
class MissingText : public Error {
 public:
  explicit MissingText(const std::string& id)
      : Error("no text for id '" + id + "'"), id_(id) {}

  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

// No relevance category could be extracted from an assessor reply.
class MalformedResponse : public Error {
 public:
  explicit MalformedResponse(std::string raw)
      : Error("no relevance category in response"), raw_(std::move(raw)) {}

  const std::string& raw() const { return raw_; }

 private:
  std::string raw_;
};

// The remote endpoint could not be reached or kept failing.
class TransportError : public Error {
 public:
  using Error::Error;
};

// The oracle backend was asked about a pair it has no truth for.
class OracleMiss : public Error {
 public:
  OracleMiss(const std::string& topic_id, const std::string& passage_id)
      : Error("no ground truth for (" + topic_id + ", " + passage_id + ")") {}
};

}  // namespace holefill

#endif  // HOLEFILL_ERRORS_H_
