// stgen_test.cpp
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

#include "fluentqa/stgen.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace fluentqa {
namespace {

QAInstance Make(const std::string &id, const std::string &ptb,
                const std::string &answer) {
  QAInstance inst{id, {}, ParsePtb(ptb), SplitTokens(answer), std::nullopt};
  inst.question = LeafTokens(inst.question_tree);
  return inst;
}

const char kNetherlands[] =
    "(ROOT (SBARQ (WHNP (WDT what) (NN year)) (SQ (VBD did) (NP (DT the) "
    "(NNP Netherlands)) (VP (VB rise) (PRT (RP up)) (PP (IN against) (NP "
    "(NNP Philip) (NNP II))))) (. ?)))";

std::set<std::string> Surfaces(const GenerationResult &r) {
  std::set<std::string> out;
  for (const auto &c : r.candidates) out.insert(JoinTokens(c.tokens));
  return out;
}

bool HasTrace(const CandidateResponse &c, const std::string &tag) {
  return std::find(c.trace.begin(), c.trace.end(), tag) != c.trace.end();
}

TEST(StgenTest, RunningExample) {
  auto r = Generate(Make("q1", kNetherlands, "1568"), RuleSet::Bundled());
  EXPECT_FALSE(r.fallback);
  EXPECT_FALSE(r.truncated);
  auto s = Surfaces(r);
  EXPECT_TRUE(s.count("the Netherlands rose up against Philip II in 1568"));
  EXPECT_TRUE(s.count("they rose up against Philip II in 1568"));
  EXPECT_TRUE(s.count("the Netherlands rose up in 1568"));
  EXPECT_TRUE(s.count("1568"));
  for (const auto &c : r.candidates) {
    if (JoinTokens(c.tokens) == "they rose up against Philip II in 1568") {
      EXPECT_TRUE(HasTrace(c, "verb-mod"));
      EXPECT_TRUE(HasTrace(c, "pronoun=they"));
      EXPECT_TRUE(HasTrace(c, "prep=in"));
    }
    if (JoinTokens(c.tokens) == "the Netherlands rose up in 1568") {
      EXPECT_TRUE(HasTrace(c, "pp-removed"));
    }
  }
}

TEST(StgenTest, FallbackWithoutSbarq) {
  auto inst = Make("q2", "(ROOT (S (NP (NNP Indiana)) (VP (VBZ is) (ADJP (JJ big)))))",
                   "Indiana");
  auto r = Generate(inst, RuleSet::Bundled());
  ASSERT_EQ(r.candidates.size(), 1u);
  EXPECT_TRUE(r.fallback);
  EXPECT_EQ(r.candidates[0].tokens, (std::vector<std::string>{"Indiana"}));
  EXPECT_EQ(r.candidates[0].trace, (std::vector<std::string>{"fallback"}));

  // Yes/no inversion.
  auto yn = Make("q3", "(ROOT (SQ (VBZ is) (NP (PRP it)) (ADJP (JJ big)) (. ?)))", "yes");
  EXPECT_TRUE(Generate(yn, RuleSet::Bundled()).fallback);
  // SBARQ without a WH word.
  auto nowh = Make("q4", "(ROOT (SBARQ (WHNP (NN year)) (SQ (VBD did) (NP (PRP it)) "
                   "(VP (VB end)))))", "1990");
  EXPECT_TRUE(Generate(nowh, RuleSet::Bundled()).fallback);
}

TEST(StgenTest, SlotExamples) {
  auto slots = FindPrepDetSlots(ParsePtb(kNetherlands), {"1568"});
  ASSERT_EQ(slots.size(), 2u);
  EXPECT_EQ(slots[0].kind, SlotDescriptor::Kind::kPreposition);
  EXPECT_TRUE(slots[0].open);
  EXPECT_FALSE(slots[1].open);

  auto in_what = FindPrepDetSlots(
      ParsePtb("(ROOT (SBARQ (WHPP (IN in) (WHNP (WDT what) (NN year))) (SQ (VBD did) "
               "(NP (PRP it)) (VP (VB end))) (. ?)))"),
      {"1990"});
  EXPECT_FALSE(in_what[0].open);
  EXPECT_EQ(in_what[0].supplied, "in");

  auto apple = FindPrepDetSlots(
      ParsePtb("(ROOT (SBARQ (WHNP (WP what)) (SQ (VBD did) (NP (PRP she)) (VP (VB eat))) "
               "(. ?)))"),
      {"an", "apple"});
  EXPECT_FALSE(apple[0].open);
  EXPECT_FALSE(apple[1].open);
}

TEST(StgenTest, SuppliedPrepositionIsReused) {
  auto inst = Make("q5",
                   "(ROOT (SBARQ (WHPP (IN in) (WHNP (WDT what) (NN year))) (SQ (VBD did) "
                   "(NP (DT the) (NN war)) (VP (VB end))) (. ?)))",
                   "1945");
  auto s = Surfaces(Generate(inst, RuleSet::Bundled()));
  EXPECT_TRUE(s.count("the war ended in 1945"));
  EXPECT_TRUE(s.count("it ended in 1945"));
  EXPECT_FALSE(s.count("the war ended 1945"));
}

TEST(StgenTest, OtherRuleFamilies) {
  auto gen = [](const char *ptb, const char *ans) {
    return Surfaces(Generate(Make("x", ptb, ans), RuleSet::Bundled()));
  };
  auto who = gen("(ROOT (SBARQ (WHNP (WP who)) (SQ (VP (VBD wrote) (NP (NNP Hamlet)))) "
                 "(. ?)))",
                 "Shakespeare");
  EXPECT_TRUE(who.count("Shakespeare wrote Hamlet"));
  auto cop = gen("(ROOT (SBARQ (WHNP (WP what)) (SQ (VBZ is) (NP (NP (DT the) (NN capital)) "
                 "(PP (IN of) (NP (NNP France))))) (. ?)))",
                 "Paris");
  EXPECT_TRUE(cop.count("the capital of France is Paris"));
  EXPECT_TRUE(cop.count("Paris is the capital of France"));
  auto modal = gen("(ROOT (SBARQ (WHNP (WP what)) (SQ (MD can) (NP (DT a) (NN cat)) "
                   "(VP (VB eat))) (. ?)))",
                   "fish");
  EXPECT_TRUE(modal.count("a cat can eat fish"));
  auto be = gen("(ROOT (SBARQ (WHADVP (WRB where)) (SQ (VBD was) (NP (NNP Chopin)) "
                "(VP (VBN born))) (. ?)))",
                "Poland");
  EXPECT_TRUE(be.count("Chopin was born in Poland"));
  auto fut = gen("(ROOT (SBARQ (WHNP (WP what)) (SQ (MD will) (NP (PRP they)) "
                 "(VP (VB build))) (. ?)))",
                 "a bridge");
  EXPECT_TRUE(fut.count("they will build a bridge"));
  auto pres = gen("(ROOT (SBARQ (WHNP (WP what)) (SQ (VBZ does) (NP (DT the) (NN dog)) "
                  "(VP (VB like))) (. ?)))",
                  "bones");
  EXPECT_TRUE(pres.count("the dog likes bones"));
  EXPECT_TRUE(pres.count("they like bones"));
}

TEST(StgenTest, PerfectHadIsFlagged) {
  auto inst = Make("q6",
                   "(ROOT (SBARQ (WHNP (WP what)) (SQ (VBD had) (NP (PRP he)) (VP (VBN "
                   "built))) (. ?)))",
                   "a house");
  auto r = Generate(inst, RuleSet::Bundled());
  bool seen = false;
  for (const auto &c : r.candidates) {
    if (JoinTokens(c.tokens) == "he had built a house") {
      seen = true;
      EXPECT_TRUE(HasTrace(c, "perfect-had"));
    }
  }
  EXPECT_TRUE(seen);
}

TEST(StgenTest, Invariants) {
  const std::vector<QAInstance> cases = {
      Make("a", kNetherlands, "1568"),
      Make("b", "(ROOT (SBARQ (WHNP (WP who)) (SQ (VP (VBD wrote) (NP (NNP Hamlet)))) (. ?)))",
           "William Shakespeare"),
      Make("c", "(ROOT (S (NP (NNP X)) (VP (VBZ is))))", "X"),
  };
  for (const auto &inst : cases) {
    auto r = Generate(inst, RuleSet::Bundled());
    auto again = Generate(inst, RuleSet::Bundled());
    ASSERT_EQ(r.candidates.size(), again.candidates.size());
    std::set<std::vector<std::string>> seen;
    bool bare = false;
    for (std::size_t i = 0; i < r.candidates.size(); ++i) {
      const auto &c = r.candidates[i];
      EXPECT_EQ(c.tokens, LeafTokens(c.derived_tree));
      EXPECT_FALSE(c.trace.empty());
      EXPECT_TRUE(seen.insert(c.tokens).second) << JoinTokens(c.tokens);
      EXPECT_EQ(c.tokens, again.candidates[i].tokens);
      bare |= c.tokens == inst.answer;
    }
    EXPECT_TRUE(bare);
  }
}

TEST(StgenTest, CapTruncatesPrefix) {
  auto inst = Make("q", kNetherlands, "1568");
  auto full = Generate(inst, RuleSet::Bundled());
  GenerateOptions opts;
  opts.cap = 7;
  auto cut = Generate(inst, RuleSet::Bundled(), opts);
  EXPECT_TRUE(cut.truncated);
  ASSERT_EQ(cut.candidates.size(), 7u);
  for (std::size_t i = 0; i < 7; ++i) {
    EXPECT_EQ(cut.candidates[i].tokens, full.candidates[i].tokens);
  }
}

// Brute-force lattice for a one-rule grammar. The expected surfaces are
// spelled out directly from the option lists.
TEST(StgenTest, LatticeMatchesBruteForce) {
  std::ifstream in(testing::SourcePath("data/st_rules.txt"));
  std::stringstream all;
  all << in.rdbuf();
  const std::string text = all.str();
  const auto start = text.find("rule do-support");
  const auto stop = text.find("end\n", start) + 4;
  RuleSet toy = RuleSet::Parse("version 1\n" + text.substr(start, stop - start));
  ASSERT_EQ(toy.rules().size(), 1u);

  auto inst = Make("t",
                   "(ROOT (SBARQ (WHNP (WDT what) (NN season)) (SQ (VBZ does) (NP (NNP Tom)) "
                   "(VP (VB leave) (PP (IN from) (NP (NNP Paris))))) (. ?)))",
                   "spring");
  const std::vector<std::vector<std::string>> prep_lists = {
      {}, {"in"}, {"in", "on", "at"}};
  const std::vector<std::vector<std::string>> pron_lists = {
      {}, {"he"}, {"he", "they"}};
  const std::vector<std::vector<std::string>> det_lists = {{}, {"the", "a"}};
  for (const auto &preps : prep_lists) {
    for (const auto &prons : pron_lists) {
      for (const auto &dets : det_lists) {
        GenerateOptions opts;
        opts.prepositions = preps;
        opts.pronouns = prons;
        opts.determiners = dets;
        auto r = Generate(inst, toy, opts);

        std::set<std::string> expected = {"spring"};
        std::vector<std::pair<std::string, std::string>> subjects = {{"Tom", "leaves"}};
        for (const auto &p : prons) {
          subjects.push_back({p, p == "they" ? "leave" : "leaves"});
        }
        std::vector<std::string> lead{""}, det{""};
        for (const auto &p : preps) lead.push_back(p + " ");
        for (const auto &d : dets) det.push_back(d + " ");
        for (const auto &[s, v] : subjects) {
          for (const auto &p : lead) {
            for (const auto &d : det) {
              for (const char *pp : {" from Paris", ""}) {
                expected.insert(s + " " + v + pp + " " + p + d + "spring");
              }
            }
          }
        }
        EXPECT_EQ(Surfaces(r), expected);
        EXPECT_EQ(r.candidates.size(),
                  1 + subjects.size() * lead.size() * det.size() * 2);
      }
    }
  }
}

TEST(StgenTest, RuleFileErrors) {
  auto line_of = [](const std::string &text) -> std::size_t {
    try {
      RuleSet::Parse(text);
    } catch (const Error &e) {
      EXPECT_EQ(e.kind(), ErrorKind::kRuleFileInvalid);
      return e.line();
    }
    ADD_FAILURE() << "accepted:\n" << text;
    return 0;
  };
  const std::string ok_body =
      "match SBARQ=q < /^WH/=wh\ninsert (ANS=answer *) >-1 q\nend\n";
  EXPECT_EQ(line_of("rule r\n" + ok_body), 1u);
  EXPECT_EQ(line_of("version 1\nrule r\nmatch SBARQ=q\n"), 2u);
  EXPECT_EQ(line_of("version 1\nrule r\nmatch A=q\nmatch B=q\nend\n"), 4u);
  EXPECT_EQ(line_of("version 1\nrule r\nmatch SBARQ=q\ndelete zz\n"
                    "insert (ANS=answer *) >-1 q\nend\n"),
            6u);
  EXPECT_EQ(line_of("version 1\nrule r\nwhen aux did\n" + ok_body), 6u);
  EXPECT_EQ(line_of("version 1\nrule r\nmatch SBARQ=q\nrelabel q S\nend\n"), 5u);
  EXPECT_EQ(line_of("version 1\nrule r\nmatch SBARQ=q (\ninsert (A=answer *) >1 q\nend\n"),
            5u);
  EXPECT_EQ(line_of("version 1\nbogus\n"), 2u);
  EXPECT_NO_THROW(RuleSet::Parse("version 1\n# c\nrule r\n" + ok_body));
}

TEST(StgenTest, BundledRulesMatchDataFile) {
  auto disk = RuleSet::FromFile(testing::SourcePath("data/st_rules.txt"));
  ASSERT_EQ(disk.rules().size(), RuleSet::Bundled().rules().size());
  for (std::size_t i = 0; i < disk.rules().size(); ++i) {
    EXPECT_EQ(disk.rules()[i].name, RuleSet::Bundled().rules()[i].name);
    EXPECT_EQ(disk.rules()[i].script_text, RuleSet::Bundled().rules()[i].script_text);
  }
  EXPECT_THROW(RuleSet::FromFile("/nonexistent/rules.txt"), Error);
}

TEST(StgenTest, TokenHelpers) {
  EXPECT_EQ(SplitTokens("  a  b\tc "), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(JoinTokens({"a", "b"}), "a b");
  EXPECT_TRUE(HasWhWord({"In", "What", "year"}));
  EXPECT_FALSE(HasWhWord({"is", "it"}));
}

}  // namespace
}  // namespace fluentqa
