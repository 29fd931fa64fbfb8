// augment.hpp
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
// Generate, rank and emit (question, answer, response) triples.
//
// Per question, candidates at or above the probability threshold are kept,
// then at most top_k of them are emitted in descending probability order.
// Fallback questions emit their answer phrase without a probability.

#ifndef FLUENTQA_AUGMENT_HPP_
#define FLUENTQA_AUGMENT_HPP_

#include <array>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "fluentqa/error.hpp"
#include "fluentqa/features.hpp"
#include "fluentqa/io.hpp"
#include "fluentqa/ranker.hpp"
#include "fluentqa/stgen.hpp"

namespace fluentqa {

struct AugmentOptions {
  double threshold = 0.5;
  std::size_t top_k = 3;
  GenerateOptions generate;
};

// Returns one probability per candidate.
using CandidateScorer = std::function<std::vector<double>(
    const QAInstance &, const std::vector<CandidateResponse> &)>;

inline CandidateScorer ModelScorer(const RankerModel &model,
                                   const FeatureExtractor &fx) {
  return [&model, &fx](const QAInstance &inst,
                       const std::vector<CandidateResponse> &cands) {
    std::vector<double> scores;
    for (const auto &x : fx.ExtractGroup(inst, cands)) {
      scores.push_back(model.Score(x));
    }
    return ScoresToProbabilities(scores, model.loss);
  };
}

// Probabilities keyed by (question id, response text); unknown pairs score 0.
using ExternalScores = std::map<std::pair<std::string, std::string>, double>;

inline ExternalScores ReadExternalScores(std::istream &in) {
  ExternalScores s;
  ForEachJsonl(in, [&](const Json &j, std::size_t) {
    std::string id = j.at("id").is_string() ? j.at("id").get<std::string>()
                                            : j.at("id").dump();
    const Json &r = j.at("response");
    std::string resp = r.is_array() ? JoinTokens(r.get<std::vector<std::string>>())
                                    : r.get<std::string>();
    s[{id, resp}] = j.at("probability").get<double>();
  });
  return s;
}

inline CandidateScorer ExternalScorer(const ExternalScores &scores) {
  return [&scores](const QAInstance &inst,
                   const std::vector<CandidateResponse> &cands) {
    std::vector<double> p;
    for (const auto &c : cands) {
      auto it = scores.find({inst.id, JoinTokens(c.tokens)});
      p.push_back(it == scores.end() ? 0.0 : it->second);
    }
    return p;
  };
}

struct QuestionAugment {
  std::string id;
  std::vector<Json> records;
  std::vector<double> probabilities;  // of emitted, non-fallback records
  bool fallback = false;
  bool truncated = false;
  bool empty = false;
};

inline QuestionAugment AugmentQuestion(const QAInstance &inst,
                                       const RuleSet &rules,
                                       const CandidateScorer &scorer,
                                       const AugmentOptions &opts = {}) {
  QuestionAugment out;
  out.id = inst.id;
  auto gen = Generate(inst, rules, opts.generate);
  out.fallback = gen.fallback;
  out.truncated = gen.truncated;

  auto record = [&](const CandidateResponse &c) {
    return Json{{"id", inst.id},
                {"question", JoinTokens(inst.question)},
                {"answer", JoinTokens(inst.answer)},
                {"response", JoinTokens(c.tokens)},
                {"trace", c.trace}};
  };
  if (gen.fallback) {
    out.records.push_back(record(gen.candidates.front()));
    return out;
  }

  const auto probs = scorer(inst, gen.candidates);
  const auto order = OrderByScore(probs, CandidateTokens(gen.candidates));
  for (std::size_t i : order) {
    if (out.records.size() >= opts.top_k || probs[i] < opts.threshold) break;
    Json r = record(gen.candidates[i]);
    r["probability"] = probs[i];
    out.records.push_back(std::move(r));
    out.probabilities.push_back(probs[i]);
  }
  out.empty = out.records.empty();
  return out;
}

struct AugmentReport {
  std::size_t instances = 0;
  std::size_t fallbacks = 0;
  std::size_t truncations = 0;
  std::size_t emitted = 0;
  std::vector<std::string> empty_questions;
  // Emitted probabilities in ten equal bins over [0, 1].
  std::array<std::size_t, 10> histogram{};

  double EmptyFraction() const {
    return instances ? double(empty_questions.size()) / double(instances) : 0;
  }

  Json ToJson() const {
    return Json{{"instances", instances},
                {"fallbacks", fallbacks},
                {"truncations", truncations},
                {"emitted", emitted},
                {"empty_questions", empty_questions},
                {"probability_histogram", histogram}};
  }
};

inline void Accumulate(const QuestionAugment &q, AugmentReport &report) {
  ++report.instances;
  report.fallbacks += q.fallback;
  report.truncations += q.truncated;
  report.emitted += q.records.size();
  if (q.empty) report.empty_questions.push_back(q.id);
  for (double p : q.probabilities) {
    std::size_t bin = p >= 1 ? 9 : p <= 0 ? 0 : static_cast<std::size_t>(p * 10);
    ++report.histogram[std::min<std::size_t>(bin, 9)];
  }
}

struct AugmentOutput {
  std::vector<Json> records;
  AugmentReport report;
};

inline AugmentOutput Augment(const std::vector<QAInstance> &instances,
                             const RuleSet &rules, const CandidateScorer &scorer,
                             const AugmentOptions &opts = {}) {
  AugmentOutput out;
  for (const auto &inst : instances) {
    auto q = AugmentQuestion(inst, rules, scorer, opts);
    Accumulate(q, out.report);
    out.records.insert(out.records.end(), q.records.begin(), q.records.end());
  }
  return out;
}

}  // namespace fluentqa

#endif  // FLUENTQA_AUGMENT_HPP_
