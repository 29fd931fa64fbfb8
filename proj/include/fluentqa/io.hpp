// io.hpp
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
// JSONL records, content hashing and file helpers shared by the pipeline.

#ifndef FLUENTQA_IO_HPP_
#define FLUENTQA_IO_HPP_

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "fluentqa/error.hpp"
#include "fluentqa/stgen.hpp"
#include "fluentqa/treebank.hpp"

namespace fluentqa {

using Json = nlohmann::json;

inline std::uint64_t Fnv1a64(std::string_view data,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string HexHash(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kDataError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void WriteFile(const std::string &path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kDataError, "cannot write " + path);
  out << content;
}

// Calls `fn(record, line_number)` for each non-blank line. Parse errors and
// errors thrown by `fn` are reported with the line number.
inline void ForEachJsonl(std::istream &in,
                         const std::function<void(const Json &, std::size_t)> &fn) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception &e) {
      throw Error(ErrorKind::kDataError, std::string("invalid JSON: ") + e.what(),
                  lineno);
    }
    try {
      fn(j, lineno);
    } catch (const Error &e) {
      if (e.line()) throw;
      throw Error(e.kind(), e.message(), lineno);
    } catch (const Json::exception &e) {
      throw Error(ErrorKind::kDataError, e.what(), lineno);
    } catch (const std::invalid_argument &e) {
      throw Error(ErrorKind::kDataError, e.what(), lineno);
    }
  }
}

inline std::vector<Json> ReadJsonl(std::istream &in) {
  std::vector<Json> out;
  ForEachJsonl(in, [&](const Json &j, std::size_t) { out.push_back(j); });
  return out;
}

inline std::string ToJsonl(const std::vector<Json> &records) {
  std::string out;
  for (const auto &r : records) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

// Token fields may be given as a list or as a whitespace-separated string.
inline std::vector<std::string> TokensFromJson(const Json &j) {
  if (j.is_string()) return SplitTokens(j.get<std::string>());
  return j.get<std::vector<std::string>>();
}

inline QAInstance InstanceFromJson(const Json &j,
                                   const PtbReadOptions &ptb = {}) {
  QAInstance inst{j.at("id").is_string() ? j.at("id").get<std::string>()
                                         : j.at("id").dump(),
                  TokensFromJson(j.at("question")),
                  ParsePtb(j.at("question_tree").get<std::string>(), ptb),
                  TokensFromJson(j.at("answer")),
                  std::nullopt};
  if (j.contains("passage_id") && !j["passage_id"].is_null()) {
    inst.passage_id = j["passage_id"].get<std::string>();
  }
  if (inst.question.empty()) {
    throw Error(ErrorKind::kDataError, "instance '" + inst.id + "' has no question");
  }
  if (inst.answer.empty()) {
    throw Error(ErrorKind::kDataError, "instance '" + inst.id + "' has no answer");
  }
  if (LeafTokens(inst.question_tree) != inst.question &&
      SurfaceTokens(inst.question_tree) != inst.question) {
    throw Error(ErrorKind::kDataError,
                "instance '" + inst.id + "': tree leaves differ from question tokens");
  }
  return inst;
}

inline Json InstanceToJson(const QAInstance &inst) {
  Json j;
  j["id"] = inst.id;
  j["question"] = inst.question;
  j["question_tree"] = ToPtb(inst.question_tree);
  j["answer"] = inst.answer;
  if (inst.passage_id) j["passage_id"] = *inst.passage_id;
  return j;
}

inline Json CandidateToJson(const CandidateResponse &c) {
  return Json{{"tokens", c.tokens}, {"tree", ToPtb(c.derived_tree)},
              {"trace", c.trace}};
}

inline CandidateResponse CandidateFromJson(const Json &j) {
  CandidateResponse c{TokensFromJson(j.at("tokens")),
                      ParsePtb(j.at("tree").get<std::string>()),
                      j.value("trace", std::vector<std::string>{})};
  if (LeafTokens(c.derived_tree) != c.tokens) {
    throw Error(ErrorKind::kDataError, "candidate tokens do not match its tree");
  }
  return c;
}

}  // namespace fluentqa

#endif  // FLUENTQA_IO_HPP_
