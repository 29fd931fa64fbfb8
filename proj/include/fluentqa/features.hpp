// features.hpp
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
// The 96-dimensional feature vector of a (question, answer, response) triple
// and z-score standardization.
//
//   0-2    token lengths of question, answer, response
//   3-11   question contains what/who/whom/whose/when/where/which/why/how
//   12     question contains no/not/none
//   13-20  normalized log-prob and perplexity of question then response
//          under the bigram and trigram LMs (q2 lp, q2 ppl, q3 lp, q3 ppl,
//          r2 lp, r2 ppl, r3 lp, r3 ppl)
//   21-56  question tree node counts per inventory label
//   57-92  response tree node counts per inventory label
//   93-95  overlap precision, recall, F1 (multiset overlap, lowercased)

#ifndef FLUENTQA_FEATURES_HPP_
#define FLUENTQA_FEATURES_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "fluentqa/error.hpp"
#include "fluentqa/morphology.hpp"
#include "fluentqa/ngram.hpp"
#include "fluentqa/stgen.hpp"
#include "fluentqa/treebank.hpp"

namespace fluentqa {

inline constexpr std::size_t kNumFeatures = 96;
inline constexpr std::string_view kFeatureSchemaVersion = "fluentqa-features-1";

using FeatureVector = std::vector<double>;

class LabelInventory {
 public:
  explicit LabelInventory(std::vector<std::string> labels)
      : labels_(std::move(labels)) {
    for (std::size_t i = 0; i < labels_.size(); ++i) index_[labels_[i]] = i;
  }

  static const LabelInventory &Default() {
    static const LabelInventory inv({
        "S",   "SBAR", "SBARQ", "SINV",  "SQ",     "NP",     "VP",  "PP",
        "ADJP", "ADVP", "WHNP", "WHPP",  "WHADVP", "WHADJP", "PRT", "INTJ",
        "CONJP", "QP",  "NN",   "NNS",   "NNP",    "NNPS",   "PRP", "PRP$",
        "DT",  "IN",   "TO",    "CD",    "JJ",     "RB",     "VB",  "VBD",
        "VBG", "VBN",  "VBP",   "VBZ"});
    return inv;
  }

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string> &labels() const { return labels_; }
  // Index of `label`, or size() when it is not in the inventory.
  std::size_t IndexOf(const std::string &label) const {
    auto it = index_.find(label);
    return it == index_.end() ? labels_.size() : it->second;
  }

 private:
  std::vector<std::string> labels_;
  std::map<std::string, std::size_t> index_;
};

namespace internal {

inline const std::vector<std::string> &NegationWords() {
  static const std::vector<std::string> v = {"no", "not", "none"};
  return v;
}

}  // namespace internal

inline const std::vector<std::string> &FeatureNames() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n = {"len_question", "len_answer", "len_response"};
    for (const auto &w : lexicon::WhWords()) n.push_back("wh_" + w);
    n.push_back("negation");
    for (const char *side : {"q", "r"}) {
      for (const char *ord : {"2", "3"}) {
        n.push_back(std::string(side) + ord + "_norm_logprob");
        n.push_back(std::string(side) + ord + "_perplexity");
      }
    }
    for (const char *side : {"q", "r"}) {
      for (const auto &l : LabelInventory::Default().labels()) {
        n.push_back(std::string(side) + "_count_" + l);
      }
    }
    n.insert(n.end(), {"overlap_precision", "overlap_recall", "overlap_f1"});
    return n;
  }();
  return names;
}

inline bool IsIndicatorFeature(std::size_t dim) { return dim >= 3 && dim <= 12; }

inline nlohmann::json FeatureSchemaJson() {
  nlohmann::json j;
  j["version"] = kFeatureSchemaVersion;
  j["names"] = FeatureNames();
  return j;
}

// Size of the multiset intersection of the lowercased tokens.
inline std::size_t MultisetOverlap(const std::vector<std::string> &a,
                                   const std::vector<std::string> &b) {
  std::map<std::string, long> counts;
  for (const auto &t : a) ++counts[ToLower(t)];
  std::size_t overlap = 0;
  for (const auto &t : b) {
    auto it = counts.find(ToLower(t));
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  return overlap;
}

inline std::vector<double> NodeCounts(const ParseTree &tree,
                                      const LabelInventory &inv) {
  std::vector<double> counts(inv.size(), 0.0);
  Preorder(tree, [&](const ParseTree &node, const TreeAddress &) {
    std::size_t i = inv.IndexOf(node.label());
    if (i < inv.size()) counts[i] += 1;
  });
  return counts;
}

// Computes the question-side features once per instance.
class FeatureExtractor {
 public:
  FeatureExtractor(const NGramModel &lm2, const NGramModel &lm3,
                   const LabelInventory &inv = LabelInventory::Default())
      : lm2_(lm2), lm3_(lm3), inv_(inv) {
    if (inv_.size() != 36) {
      throw Error(ErrorKind::kDimensionMismatch,
                  "label inventory must hold 36 labels");
    }
  }

  std::vector<FeatureVector> ExtractGroup(
      const QAInstance &inst,
      const std::vector<CandidateResponse> &candidates) const {
    const FeatureVector q = QuestionPart(inst);
    std::vector<FeatureVector> out;
    out.reserve(candidates.size());
    for (const auto &c : candidates) out.push_back(Complete(q, inst, c));
    return out;
  }

  FeatureVector Extract(const QAInstance &inst,
                        const CandidateResponse &c) const {
    return Complete(QuestionPart(inst), inst, c);
  }

 private:
  FeatureVector QuestionPart(const QAInstance &inst) const {
    FeatureVector v(kNumFeatures, 0.0);
    v[0] = double(inst.question.size());
    v[1] = double(inst.answer.size());
    std::vector<std::string> lower;
    for (const auto &t : inst.question) lower.push_back(ToLower(t));
    const auto &wh = lexicon::WhWords();
    for (std::size_t i = 0; i < wh.size(); ++i) {
      v[3 + i] = lexicon::Contains(lower, wh[i]) ? 1.0 : 0.0;
    }
    for (const auto &n : internal::NegationWords()) {
      if (lexicon::Contains(lower, n)) v[12] = 1.0;
    }
    auto s2 = lm2_.Score(inst.question), s3 = lm3_.Score(inst.question);
    v[13] = s2.normalized_log_prob;
    v[14] = s2.perplexity;
    v[15] = s3.normalized_log_prob;
    v[16] = s3.perplexity;
    auto counts = NodeCounts(inst.question_tree, inv_);
    std::copy(counts.begin(), counts.end(), v.begin() + 21);
    return v;
  }

  FeatureVector Complete(FeatureVector v, const QAInstance &inst,
                         const CandidateResponse &c) const {
    v[2] = double(c.tokens.size());
    auto s2 = lm2_.Score(c.tokens), s3 = lm3_.Score(c.tokens);
    v[17] = s2.normalized_log_prob;
    v[18] = s2.perplexity;
    v[19] = s3.normalized_log_prob;
    v[20] = s3.perplexity;
    auto counts = NodeCounts(c.derived_tree, inv_);
    std::copy(counts.begin(), counts.end(), v.begin() + 57);
    const double overlap = double(MultisetOverlap(inst.question, c.tokens));
    const double p = inst.question.empty() ? 0 : overlap / inst.question.size();
    const double r = c.tokens.empty() ? 0 : overlap / c.tokens.size();
    v[93] = p;
    v[94] = r;
    v[95] = p + r > 0 ? 2 * p * r / (p + r) : 0;
    return v;
  }

  const NGramModel &lm2_;
  const NGramModel &lm3_;
  const LabelInventory &inv_;
};

inline FeatureVector ExtractFeatures(
    const QAInstance &inst, const CandidateResponse &c, const NGramModel &lm2,
    const NGramModel &lm3,
    const LabelInventory &inv = LabelInventory::Default()) {
  return FeatureExtractor(lm2, lm3, inv).Extract(inst, c);
}

// Z-scores continuous dimensions with training-set statistics; indicator
// dimensions pass through.
struct Standardization {
  std::vector<double> mean;
  std::vector<double> scale;

  static constexpr double kMinScale = 1e-8;

  static Standardization Fit(const std::vector<FeatureVector> &vectors) {
    Standardization s;
    s.mean.assign(kNumFeatures, 0.0);
    s.scale.assign(kNumFeatures, 1.0);
    if (vectors.empty()) return s;
    for (const auto &v : vectors) CheckDims(v);
    const double n = double(vectors.size());
    for (std::size_t d = 0; d < kNumFeatures; ++d) {
      if (IsIndicatorFeature(d)) continue;
      double sum = 0;
      for (const auto &v : vectors) sum += v[d];
      const double mu = sum / n;
      double ss = 0;
      for (const auto &v : vectors) ss += (v[d] - mu) * (v[d] - mu);
      s.mean[d] = mu;
      s.scale[d] = std::max(std::sqrt(ss / n), kMinScale);
    }
    return s;
  }

  FeatureVector Apply(const FeatureVector &v) const {
    CheckDims(v);
    if (mean.size() != v.size() || scale.size() != v.size()) {
      throw Error(ErrorKind::kDimensionMismatch,
                  "standardization statistics do not match vector size");
    }
    FeatureVector out(v.size());
    for (std::size_t d = 0; d < v.size(); ++d) {
      out[d] = (v[d] - mean[d]) / scale[d];
    }
    return out;
  }

  static void CheckDims(const FeatureVector &v) {
    if (v.size() != kNumFeatures) {
      throw Error(ErrorKind::kDimensionMismatch,
                  "feature vector has " + std::to_string(v.size()) +
                      " dimensions, expected " + std::to_string(kNumFeatures));
    }
  }
};

}  // namespace fluentqa

#endif  // FLUENTQA_FEATURES_HPP_
