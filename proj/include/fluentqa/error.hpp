// error.hpp
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
//
// \file
// Error kinds shared by every fluentqa module.

#ifndef FLUENTQA_ERROR_HPP_
#define FLUENTQA_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fluentqa {

enum class ErrorKind {
  kUnbalancedBrackets,
  kEmptyLabel,
  kTrailingContent,
  kPatternSyntax,
  kNoMatch,
  kInvalidEditTarget,
  kUnknownAuxiliary,
  kRuleFileInvalid,
  kEmptyCorpus,
  kMalformedArpa,
  kDimensionMismatch,
  kSchemaMismatch,
  kDegenerateData,
  kNoPositive,
  kNoPositives,
  kUnknownResponse,
  kDataError,
};

inline std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUnbalancedBrackets: return "UnbalancedBrackets";
    case ErrorKind::kEmptyLabel: return "EmptyLabel";
    case ErrorKind::kTrailingContent: return "TrailingContent";
    case ErrorKind::kPatternSyntax: return "PatternSyntaxError";
    case ErrorKind::kNoMatch: return "NoMatch";
    case ErrorKind::kInvalidEditTarget: return "InvalidEditTarget";
    case ErrorKind::kUnknownAuxiliary: return "UnknownAuxiliary";
    case ErrorKind::kRuleFileInvalid: return "RuleFileInvalid";
    case ErrorKind::kEmptyCorpus: return "EmptyCorpus";
    case ErrorKind::kMalformedArpa: return "MalformedArpa";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kSchemaMismatch: return "SchemaMismatch";
    case ErrorKind::kDegenerateData: return "DegenerateData";
    case ErrorKind::kNoPositive: return "NoPositive";
    case ErrorKind::kNoPositives: return "NoPositives";
    case ErrorKind::kUnknownResponse: return "UnknownResponse";
    case ErrorKind::kDataError: return "DataError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + what),
        kind_(kind),
        message_(what) {}

  // Carries the 1-based input line that triggered the error (0 = none).
  Error(ErrorKind kind, const std::string &what, std::size_t line)
      : std::runtime_error(std::string(ErrorKindName(kind)) + ": line " +
                           std::to_string(line) + ": " + what),
        kind_(kind),
        message_(what),
        line_(line) {}

  ErrorKind kind() const { return kind_; }
  // The message without kind and line prefixes.
  const std::string &message() const { return message_; }
  std::size_t line() const { return line_; }

 private:
  ErrorKind kind_;
  std::string message_;
  std::size_t line_ = 0;
};

}  // namespace fluentqa

#endif  // FLUENTQA_ERROR_HPP_
