// datasets.hpp
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
// Building labeled train/val/test groups from generated candidates and
// annotator choices.
//
// Labels: in train a candidate is good when at least two distinct annotators
// chose it, and questions left without a good candidate are dropped. In val
// and test one annotator suffices, except for the shortest candidate, which
// still needs two.

#ifndef FLUENTQA_DATASETS_HPP_
#define FLUENTQA_DATASETS_HPP_

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "fluentqa/error.hpp"
#include "fluentqa/evalkit.hpp"
#include "fluentqa/features.hpp"
#include "fluentqa/io.hpp"
#include "fluentqa/ranker.hpp"
#include "fluentqa/stgen.hpp"

namespace fluentqa {

enum class SplitKind { kTrain, kVal, kTest };

inline std::string_view SplitName(SplitKind k) {
  switch (k) {
    case SplitKind::kTrain: return "train";
    case SplitKind::kVal: return "val";
    case SplitKind::kTest: return "test";
  }
  return "";
}

inline constexpr std::string_view kAnswerTooLong = "answer-too-long";
inline constexpr std::string_view kParseFailure = "parse-failure";

struct FilterOptions {
  std::size_t max_answer_tokens = 5;
  // Keep questions without SBARQ/SQ; they will take the fallback path.
  bool keep_parse_failures = false;
};

struct FilterResult {
  std::vector<QAInstance> kept;
  std::map<std::string, std::size_t> drop_counts;
  std::vector<std::pair<std::string, std::string>> dropped;  // id, reason
};

inline FilterResult FilterInstances(const std::vector<QAInstance> &instances,
                                    const FilterOptions &opts = {}) {
  FilterResult r;
  for (const auto &inst : instances) {
    std::string reason;
    if (inst.answer.size() > opts.max_answer_tokens) {
      reason = kAnswerTooLong;
    } else if (!opts.keep_parse_failures &&
               !ContainsLabel(inst.question_tree, "SBARQ") &&
               !ContainsLabel(inst.question_tree, "SQ")) {
      reason = kParseFailure;
    }
    if (reason.empty()) {
      r.kept.push_back(inst);
    } else {
      ++r.drop_counts[reason];
      r.dropped.emplace_back(inst.id, reason);
    }
  }
  return r;
}

struct GeneratedGroup {
  QAInstance instance;
  std::vector<CandidateResponse> candidates;
};

struct LabeledGroup {
  QAInstance instance;
  std::vector<CandidateResponse> candidates;
  std::vector<int> labels;
};

struct SGSplit {
  SplitKind kind = SplitKind::kTrain;
  std::vector<LabeledGroup> groups;
  // Train questions removed for lack of a qualifying good response.
  std::vector<std::string> dropped;
};

// Annotations for questions outside `groups` are ignored; an annotation
// naming a response missing from its question's candidates is an error.
inline SGSplit BuildLabels(const std::vector<GeneratedGroup> &groups,
                           const std::vector<AnnotationRecord> &annotations,
                           SplitKind kind) {
  std::map<std::string, std::size_t> by_id;
  for (std::size_t g = 0; g < groups.size(); ++g) by_id[groups[g].instance.id] = g;

  // pickers[g][candidate] = distinct annotators
  std::vector<std::vector<std::set<std::string>>> pickers(groups.size());
  std::vector<std::map<std::string, std::vector<std::size_t>>> lookup(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    pickers[g].resize(groups[g].candidates.size());
    for (std::size_t c = 0; c < groups[g].candidates.size(); ++c) {
      lookup[g][NormalizeResponse(JoinTokens(groups[g].candidates[c].tokens))]
          .push_back(c);
    }
  }
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    const auto &a = annotations[i];
    auto it = by_id.find(a.question_id);
    if (it == by_id.end()) continue;
    auto hit = lookup[it->second].find(NormalizeResponse(a.response));
    if (hit == lookup[it->second].end()) {
      throw Error(ErrorKind::kUnknownResponse,
                  "question '" + a.question_id + "' has no candidate '" +
                      a.response + "'",
                  i + 1);
    }
    for (std::size_t c : hit->second) pickers[it->second][c].insert(a.annotator_id);
  }

  SGSplit split;
  split.kind = kind;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto &cands = groups[g].candidates;
    LabeledGroup lg{groups[g].instance, cands, std::vector<int>(cands.size(), 0)};
    const std::size_t shortest =
        cands.empty() ? 0 : ShortestResponseBaseline(CandidateTokens(cands));
    bool any = false;
    for (std::size_t c = 0; c < cands.size(); ++c) {
      const std::size_t n = pickers[g][c].size();
      const bool good = kind == SplitKind::kTrain || c == shortest ? n >= 2 : n >= 1;
      lg.labels[c] = good ? 1 : 0;
      any |= good;
    }
    if (kind == SplitKind::kTrain && !any) {
      split.dropped.push_back(groups[g].instance.id);
      continue;
    }
    split.groups.push_back(std::move(lg));
  }
  return split;
}

struct SplitRatios {
  double train = 2000;
  double val = 300;
  double test = 700;
};

// Seeded assignment of `n` items to splits in the given proportions.
inline std::vector<SplitKind> AssignSplits(std::size_t n,
                                           const SplitRatios &ratios = {},
                                           std::uint64_t seed = 13) {
  const double total = ratios.train + ratios.val + ratios.test;
  if (total <= 0) throw Error(ErrorKind::kDataError, "split ratios sum to zero");
  const auto n_train = static_cast<std::size_t>(std::llround(n * ratios.train / total));
  const auto n_val = std::min(
      n - std::min(n, n_train),
      static_cast<std::size_t>(std::llround(n * ratios.val / total)));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  internal::Shuffle(idx, rng);
  std::vector<SplitKind> out(n, SplitKind::kTest);
  for (std::size_t i = 0; i < n; ++i) {
    if (i < n_train) {
      out[idx[i]] = SplitKind::kTrain;
    } else if (i < n_train + n_val) {
      out[idx[i]] = SplitKind::kVal;
    }
  }
  return out;
}

inline Json LabeledGroupToJson(const LabeledGroup &g) {
  Json cands = Json::array();
  for (std::size_t c = 0; c < g.candidates.size(); ++c) {
    Json j = CandidateToJson(g.candidates[c]);
    j["label"] = g.labels[c];
    cands.push_back(std::move(j));
  }
  return Json{{"id", g.instance.id},
              {"question", g.instance.question},
              {"tree", ToPtb(g.instance.question_tree)},
              {"answer", g.instance.answer},
              {"candidates", std::move(cands)}};
}

inline LabeledGroup LabeledGroupFromJson(const Json &j) {
  Json inst = j;
  if (!inst.contains("question_tree")) inst["question_tree"] = j.at("tree");
  LabeledGroup g{InstanceFromJson(inst), {}, {}};
  for (const auto &c : j.at("candidates")) {
    g.candidates.push_back(CandidateFromJson(c));
    g.labels.push_back(c.value("label", 0));
  }
  return g;
}

inline FeatureGroup Featurize(const FeatureExtractor &fx, const LabeledGroup &g) {
  return {g.instance.id, fx.ExtractGroup(g.instance, g.candidates), g.labels,
          CandidateTokens(g.candidates)};
}

inline AnnotationRecord AnnotationFromJson(const Json &j) {
  auto text = [](const Json &v) {
    return v.is_string() ? v.get<std::string>() : v.dump();
  };
  const Json &resp = j.at("response");
  return {text(j.at("question_id")), text(j.at("annotator_id")),
          resp.is_array() ? JoinTokens(resp.get<std::vector<std::string>>())
                          : resp.get<std::string>()};
}

}  // namespace fluentqa

#endif  // FLUENTQA_DATASETS_HPP_
