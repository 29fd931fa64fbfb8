// features_test.cpp
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

#include "fluentqa/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace fluentqa {
namespace {

NGramModel Lm(int order) {
  NGramOptions o;
  o.order = order;
  return NGramModel::Train({{"who", "wrote", "hamlet"},
                            {"shakespeare", "wrote", "hamlet"},
                            {"what", "is", "not", "here"}},
                           o);
}

QAInstance Who() {
  QAInstance inst{"w",
                  {"who", "wrote", "hamlet"},
                  ParsePtb("(ROOT (SBARQ (WHNP (WP who)) (SQ (VP (VBD wrote) (NP (NN "
                           "hamlet))))))"),
                  {"shakespeare"},
                  std::nullopt};
  return inst;
}

CandidateResponse Cand(const std::string &ptb) {
  ParseTree t = ParsePtb(ptb);
  return {LeafTokens(t), t, {"test"}};
}

// Opening-bracket count of `label` in the printed tree.
double PrintedCount(const ParseTree &t, const std::string &label) {
  const std::string text = ToPtb(t);
  const std::string needle = "(" + label + " ";
  double n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + 1)) {
    ++n;
  }
  return n;
}

TEST(FeaturesTest, LayoutAndSchema) {
  EXPECT_EQ(FeatureNames().size(), kNumFeatures);
  std::set<std::string> unique(FeatureNames().begin(), FeatureNames().end());
  EXPECT_EQ(unique.size(), kNumFeatures);
  const auto &inv = LabelInventory::Default();
  EXPECT_EQ(inv.size(), 36u);
  EXPECT_EQ(std::set<std::string>(inv.labels().begin(), inv.labels().end()).size(), 36u);
  EXPECT_EQ(FeatureSchemaJson()["names"].size(), kNumFeatures);
  EXPECT_THROW(FeatureExtractor(Lm(2), Lm(3), LabelInventory({"NP"})), Error);
}

TEST(FeaturesTest, OverlapExample) {
  auto lm2 = Lm(2), lm3 = Lm(3);
  auto v = ExtractFeatures(Who(), Cand("(S (NP (NNP shakespeare)) (VP (VBD wrote) (NP (NN "
                                       "hamlet))))"),
                           lm2, lm3);
  ASSERT_EQ(v.size(), kNumFeatures);
  EXPECT_DOUBLE_EQ(v[93], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(v[94], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(v[95], 2.0 / 3.0);
  EXPECT_EQ(v[0], 3);
  EXPECT_EQ(v[1], 1);
  EXPECT_EQ(v[2], 3);

  auto same = ExtractFeatures(Who(), Cand("(S (WP Who) (VBD wrote) (NN hamlet))"), lm2, lm3);
  EXPECT_DOUBLE_EQ(same[93], 1.0);
  EXPECT_DOUBLE_EQ(same[94], 1.0);
  EXPECT_DOUBLE_EQ(same[95], 1.0);
  auto none = ExtractFeatures(Who(), Cand("(NP (NN x))"), lm2, lm3);
  EXPECT_EQ(none[95], 0.0);
}

TEST(FeaturesTest, Indicators) {
  auto lm2 = Lm(2), lm3 = Lm(3);
  QAInstance what = Who();
  what.question = {"what", "is", "not", "here"};
  auto v = ExtractFeatures(what, Cand("(NP (NN x))"), lm2, lm3);
  EXPECT_EQ(v[3], 1.0);
  for (int d = 4; d <= 11; ++d) EXPECT_EQ(v[d], 0.0) << d;
  EXPECT_EQ(v[12], 1.0);
  auto w = ExtractFeatures(Who(), Cand("(NP (NN x))"), lm2, lm3);
  EXPECT_EQ(w[3], 0.0);
  EXPECT_EQ(w[4], 1.0);
  EXPECT_EQ(w[12], 0.0);
}

TEST(FeaturesTest, LanguageModelBlock) {
  auto lm2 = Lm(2), lm3 = Lm(3);
  auto c = Cand("(S (NNP shakespeare) (VBD wrote))");
  auto v = ExtractFeatures(Who(), c, lm2, lm3);
  EXPECT_EQ(v[13], lm2.Score(Who().question).normalized_log_prob);
  EXPECT_EQ(v[14], lm2.Score(Who().question).perplexity);
  EXPECT_EQ(v[15], lm3.Score(Who().question).normalized_log_prob);
  EXPECT_EQ(v[16], lm3.Score(Who().question).perplexity);
  EXPECT_EQ(v[17], lm2.Score(c.tokens).normalized_log_prob);
  EXPECT_EQ(v[18], lm2.Score(c.tokens).perplexity);
  EXPECT_EQ(v[19], lm3.Score(c.tokens).normalized_log_prob);
  EXPECT_EQ(v[20], lm3.Score(c.tokens).perplexity);
}

TEST(FeaturesTest, RandomTreesAgainstBruteForce) {
  auto lm2 = Lm(2), lm3 = Lm(3);
  FeatureExtractor fx(lm2, lm3);
  std::mt19937 rng(31);
  const std::vector<std::string> labels = {"NP", "VP", "S", "FRAG", "NN", "XX",
                                           "PRP$", "WHNP", "X", "DT"};
  const std::vector<std::string> words = {"who", "Wrote", "hamlet", "the", "not", "x"};
  const auto &inv = LabelInventory::Default();
  for (int i = 0; i < 200; ++i) {
    QAInstance inst = Who();
    inst.question_tree = testing::RandomTree(rng, labels, words, 20);
    inst.question = LeafTokens(inst.question_tree);
    auto c = Cand(ToPtb(testing::RandomTree(rng, labels, words, 20)));
    auto v = fx.Extract(inst, c);
    ASSERT_EQ(v, fx.ExtractGroup(inst, {c})[0]);
    double qsum = 0;
    for (std::size_t k = 0; k < inv.size(); ++k) {
      EXPECT_EQ(v[21 + k], PrintedCount(inst.question_tree, inv.labels()[k]));
      EXPECT_EQ(v[57 + k], PrintedCount(c.derived_tree, inv.labels()[k]));
      qsum += v[21 + k];
    }
    EXPECT_LE(qsum, double(inst.question_tree.size()));

    // Overlap through sorted lowercase lists.
    auto lower = [](std::vector<std::string> t) {
      for (auto &s : t) s = ToLower(s);
      std::sort(t.begin(), t.end());
      return t;
    };
    auto a = lower(inst.question), b = lower(c.tokens);
    std::vector<std::string> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::back_inserter(common));
    const double p = double(common.size()) / a.size();
    const double r = double(common.size()) / b.size();
    EXPECT_DOUBLE_EQ(v[93], p);
    EXPECT_DOUBLE_EQ(v[94], r);
    EXPECT_NEAR(v[95], p + r > 0 ? 2 * p * r / (p + r) : 0, 1e-15);
    for (int d = 93; d <= 95; ++d) {
      EXPECT_GE(v[d], 0.0);
      EXPECT_LE(v[d], 1.0);
    }
    for (std::size_t d = 3; d <= 12; ++d) EXPECT_TRUE(v[d] == 0.0 || v[d] == 1.0);
  }
}

TEST(FeaturesTest, FlatFallbackTreeHasNoCounts) {
  auto lm2 = Lm(2), lm3 = Lm(3);
  QAInstance inst = Who();
  auto c = AnswerOnlyCandidate(inst, "fallback");
  auto v = ExtractFeatures(inst, c, lm2, lm3);
  for (std::size_t k = 0; k < 36; ++k) EXPECT_EQ(v[57 + k], 0.0);
}

TEST(FeaturesTest, Standardization) {
  std::mt19937 rng(9);
  std::normal_distribution<double> g(3.0, 2.0);
  std::vector<FeatureVector> train(50, FeatureVector(kNumFeatures, 0.0));
  for (auto &v : train) {
    for (std::size_t d = 0; d < kNumFeatures; ++d) {
      v[d] = IsIndicatorFeature(d) ? double(rng() % 2) : g(rng);
    }
    v[40] = 7.0;  // constant column
  }
  auto s = Standardization::Fit(train);
  std::vector<FeatureVector> z;
  for (const auto &v : train) z.push_back(s.Apply(v));
  for (std::size_t d = 0; d < kNumFeatures; ++d) {
    double mean = 0;
    for (const auto &v : z) mean += v[d];
    mean /= z.size();
    if (IsIndicatorFeature(d)) {
      for (std::size_t i = 0; i < z.size(); ++i) EXPECT_EQ(z[i][d], train[i][d]);
    } else {
      EXPECT_NEAR(mean, 0.0, 1e-9) << d;
    }
  }
  for (const auto &v : z) EXPECT_EQ(v[40], 0.0);
  EXPECT_EQ(s.Apply(train[3]), z[3]);
  EXPECT_THROW(s.Apply(FeatureVector(95, 0.0)), Error);
  try {
    Standardization::Fit({FeatureVector(10, 0.0)});
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDimensionMismatch);
  }
}

}  // namespace
}  // namespace fluentqa
