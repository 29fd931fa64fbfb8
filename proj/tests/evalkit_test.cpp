// evalkit_test.cpp
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

#include "fluentqa/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace fluentqa {
namespace {

ScoredGroup Group(std::vector<double> s, std::vector<int> l) {
  return {"g", std::move(s), std::move(l), {}};
}

TEST(EvalkitTest, PrecisionAtOne) {
  EXPECT_DOUBLE_EQ(PrecisionAtOne({Group({0.9, 0.1}, {1, 0}), Group({0.9, 0.1}, {0, 1})}),
                   0.5);
  EXPECT_DOUBLE_EQ(PrecisionAtOne({Group({0.9, 0.1}, {1, 0}), Group({0.2, 0.3}, {0, 1})}),
                   1.0);
  // Ties go to the shorter candidate.
  ScoredGroup tie{"t", {1.0, 1.0}, {0, 1}, {{"a", "b", "c"}, {"a"}}};
  EXPECT_DOUBLE_EQ(PrecisionAtOne({tie}), 1.0);
}

TEST(EvalkitTest, MaxF1Example) {
  auto r = MaxF1({Group({0.9, 0.8, 0.3}, {1, 0, 1})});
  EXPECT_NEAR(r.value, 0.8, 1e-12);
  EXPECT_EQ(r.threshold, 0.3);
  EXPECT_NEAR(r.precision, 2.0 / 3.0, 1e-12);
  EXPECT_EQ(r.recall, 1.0);
  EXPECT_EQ(MaxF1({Group({0.9, 0.8, 0.1}, {1, 1, 0})}).value, 1.0);
  try {
    MaxF1({Group({0.3, 0.2}, {0, 0})});
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNoPositives);
  }
}

TEST(EvalkitTest, PrAucExample) {
  EXPECT_NEAR(PrAuc({Group({0.9, 0.8, 0.3}, {1, 0, 1})}), 0.5 + 0.5 * 2.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(PrAuc({Group({5, 4, 3, 2, 1}, {1, 1, 1, 0, 0})}), 1.0);
  EXPECT_THROW(PrAuc({Group({1}, {0})}), Error);
}

TEST(EvalkitTest, MatchesBruteForceOnRandomInputs) {
  std::mt19937 rng(41);
  for (int t = 0; t < 300; ++t) {
    const int n = 1 + static_cast<int>(rng() % 100);
    std::vector<double> s;
    std::vector<int> l;
    for (int i = 0; i < n; ++i) {
      // Coarse scores so ties are common.
      s.push_back(double(rng() % 20) / 4.0);
      l.push_back(rng() % 3 == 0);
    }
    l[rng() % n] = 1;
    // Split into groups to exercise pooling.
    std::vector<ScoredGroup> gs;
    for (int i = 0; i < n; i += 7) {
      const int e = std::min(n, i + 7);
      gs.push_back(Group(std::vector<double>(s.begin() + i, s.begin() + e),
                         std::vector<int>(l.begin() + i, l.begin() + e)));
    }
    auto ref = testing::ReferenceMaxF1(s, l);
    auto got = MaxF1(gs);
    ASSERT_NEAR(got.value, ref.value, 1e-12);
    ASSERT_EQ(got.threshold, ref.threshold);
    ASSERT_NEAR(got.precision, ref.precision, 1e-12);
    ASSERT_NEAR(got.recall, ref.recall, 1e-12);
    ASSERT_NEAR(PrAuc(gs), testing::ReferenceAveragePrecision(s, l), 1e-12);
    for (double v : {got.value, PrAuc(gs)}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(EvalkitTest, InvariantUnderIncreasingTransforms) {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int t = 0; t < 100; ++t) {
    std::vector<ScoredGroup> a, b;
    for (int g = 0; g < 5; ++g) {
      ScoredGroup x{"g", {}, {}, {}};
      for (int i = 0; i < 6; ++i) {
        x.scores.push_back(std::round(u(rng) * 2) / 2);
        x.labels.push_back(rng() % 2);
        x.tokens.push_back(std::vector<std::string>(1 + rng() % 4, "w" + std::to_string(i)));
      }
      x.labels[0] = 1;
      ScoredGroup y = x;
      for (auto &v : y.scores) v = std::exp(v) * 3 + 1;
      a.push_back(x);
      b.push_back(y);
    }
    EXPECT_EQ(PrecisionAtOne(a), PrecisionAtOne(b));
    EXPECT_NEAR(MaxF1(a).value, MaxF1(b).value, 1e-12);
  }
}

TEST(EvalkitTest, ReversedPerfectRankingMinimizesAp) {
  std::mt19937 rng(43);
  std::vector<int> labels = {1, 1, 1, 0, 0, 0, 0, 0};
  std::vector<double> reversed;
  for (std::size_t i = 0; i < labels.size(); ++i) reversed.push_back(double(i));
  const double worst = PrAuc({Group(reversed, labels)});
  for (int t = 0; t < 200; ++t) {
    std::vector<double> perm = reversed;
    std::shuffle(perm.begin(), perm.end(), rng);
    EXPECT_GE(PrAuc({Group(perm, labels)}) + 1e-12, worst);
  }
}

TEST(EvalkitTest, MacroAveraging) {
  std::vector<ScoredGroup> gs = {Group({0.9, 0.8, 0.3}, {1, 0, 1}),
                                 Group({0.5, 0.4}, {0, 1}), Group({0.5}, {0})};
  const double f1a = testing::ReferenceMaxF1({0.9, 0.8, 0.3}, {1, 0, 1}).value;
  const double f1b = testing::ReferenceMaxF1({0.5, 0.4}, {0, 1}).value;
  EXPECT_NEAR(MaxF1(gs, true).value, (f1a + f1b) / 2, 1e-12);
  EXPECT_NEAR(PrAuc(gs, true),
              (testing::ReferenceAveragePrecision({0.9, 0.8, 0.3}, {1, 0, 1}) +
               testing::ReferenceAveragePrecision({0.5, 0.4}, {0, 1})) /
                  2,
              1e-12);
  auto report = MetricsReport(gs);
  EXPECT_EQ(report["n_questions"], 3);
  EXPECT_EQ(report["n_candidates"], 6);
  EXPECT_TRUE(report["max_f1"].contains("threshold"));
}

TEST(EvalkitTest, Agreement) {
  std::vector<AnnotationRecord> r = {
      {"q1", "a1", "A"}, {"q1", "a2", "A"}, {"q1", "a3", "B"},
      {"q2", "a1", "C"}, {"q2", "a2", "C"}, {"q2", "a3", "C"}};
  EXPECT_NEAR(AnnotatorAgreement(r), 2.5 / 3.0, 1e-12);

  std::vector<AnnotationRecord> same, unique;
  for (int q = 0; q < 4; ++q) {
    for (int a = 0; a < 5; ++a) {
      same.push_back({"q" + std::to_string(q), "a" + std::to_string(a), "x"});
      unique.push_back({"q" + std::to_string(q), "a" + std::to_string(a),
                        "x" + std::to_string(a)});
    }
  }
  EXPECT_EQ(AnnotatorAgreement(same), 1.0);
  EXPECT_EQ(AnnotatorAgreement(unique), 0.0);
  // Normalization of case and spacing.
  EXPECT_EQ(AnnotatorAgreement({{"q", "a", "In  1568"}, {"q", "b", "in 1568 "}}), 1.0);
  EXPECT_EQ(NormalizeResponse("  The   Dog "), "the dog");
}

TEST(EvalkitTest, AgreementWeightsByQuestions) {
  // a1 annotates three questions, a2 one.
  std::vector<AnnotationRecord> r = {
      {"q1", "a1", "x"}, {"q2", "a1", "y"}, {"q3", "a1", "z"},
      {"q1", "a2", "x"}, {"q1", "a3", "w"}};
  // a1: 1/3 (weight 3), a2: 1/1 (weight 1), a3: 0/1 (weight 1).
  EXPECT_NEAR(AnnotatorAgreement(r), (3 * (1.0 / 3) + 1 + 0) / 5, 1e-12);
}

}  // namespace
}  // namespace fluentqa
