// stgen.hpp
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
// Over-generation of candidate answer responses from a question parse and an
// answer phrase.
//
// Each rule in a RuleSet rewrites the question into a declarative skeleton
// holding an "answer" placeholder. The skeleton is then expanded into the
// cross product of
//
//   subject     kept, or swapped with each pronoun
//   preposition each option when the question leaves the slot open
//   determiner  each option when the answer lacks one
//   PPs         each optional prepositional phrase kept or removed
//
// with the main verb re-inflected once per subject choice. The bare answer is
// always the first candidate. Questions that are not SBARQ clauses, or that
// have no WH-word, yield only the answer phrase.

#ifndef FLUENTQA_STGEN_HPP_
#define FLUENTQA_STGEN_HPP_

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "fluentqa/bundled_data.hpp"
#include "fluentqa/error.hpp"
#include "fluentqa/morphology.hpp"
#include "fluentqa/treebank.hpp"
#include "fluentqa/treeops.hpp"

namespace fluentqa {

struct QAInstance {
  std::string id;
  std::vector<std::string> question;
  ParseTree question_tree;
  std::vector<std::string> answer;
  std::optional<std::string> passage_id;
};

struct CandidateResponse {
  std::vector<std::string> tokens;
  ParseTree derived_tree;
  std::vector<std::string> trace;
};

inline std::vector<std::vector<std::string>> CandidateTokens(
    const std::vector<CandidateResponse> &candidates) {
  std::vector<std::vector<std::string>> out;
  for (const auto &c : candidates) out.push_back(c.tokens);
  return out;
}

inline std::string JoinTokens(const std::vector<std::string> &tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

inline std::vector<std::string> SplitTokens(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

// ---------------------------------------------------------------------------
// Rule files

struct StRule {
  std::string name;
  // capture name -> accepted lowercased leaf tokens
  std::map<std::string, std::set<std::string>> guards;
  TreePattern pattern;
  SurgeryScript script;
  std::string script_text;
};

class RuleSet {
 public:
  static RuleSet Parse(std::string_view text);

  static RuleSet FromFile(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::kRuleFileInvalid, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return Parse(ss.str());
  }

  static const RuleSet &Bundled() {
    static const RuleSet rules = Parse(bundled::kStRules);
    return rules;
  }

  int version() const { return version_; }
  const std::vector<StRule> &rules() const { return rules_; }

 private:
  int version_ = 0;
  std::vector<StRule> rules_;
};

inline RuleSet RuleSet::Parse(std::string_view text) {
  RuleSet set;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;

  std::size_t rule_start = 0;  // line of the open rule, 0 outside
  std::string name;
  std::map<std::string, std::set<std::string>> guards;
  std::optional<std::string> pattern_text;
  std::string script_text;

  auto fail = [&](const std::string &why) {
    throw Error(ErrorKind::kRuleFileInvalid, why, lineno);
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto words = SplitTokens(line);
    if (words.empty() || words[0][0] == '#') continue;
    const std::string &kw = words[0];

    if (!rule_start) {
      if (kw == "version") {
        if (words.size() != 2) fail("expected 'version <n>'");
        try {
          set.version_ = std::stoi(words[1]);
        } catch (const std::logic_error &) {
          fail("bad version number");
        }
      } else if (kw == "rule") {
        if (set.version_ == 0) fail("'version' must precede the first rule");
        if (words.size() != 2) fail("expected 'rule <name>'");
        rule_start = lineno;
        name = words[1];
        guards.clear();
        pattern_text.reset();
        script_text.clear();
      } else {
        fail("unexpected '" + kw + "' outside a rule");
      }
      continue;
    }

    if (kw == "when") {
      if (words.size() < 3) fail("expected 'when <capture> <word>...'");
      for (std::size_t i = 2; i < words.size(); ++i) {
        guards[words[1]].insert(ToLower(words[i]));
      }
    } else if (kw == "match") {
      if (pattern_text) fail("rule '" + name + "' has two patterns");
      auto pos = line.find("match");
      pattern_text = line.substr(pos + 5);
    } else if (kw == "end") {
      if (!pattern_text) fail("rule '" + name + "' has no pattern");
      StRule rule{name, guards, TreePattern::Compile("__"), {}, script_text};
      try {
        rule.pattern = TreePattern::Compile(*pattern_text);
        rule.script = SurgeryScript::Parse(script_text);
      } catch (const Error &e) {
        fail("rule '" + name + "': " + e.message());
      }
      auto missing = rule.script.UnresolvedNames(rule.pattern);
      if (!missing.empty()) {
        fail("rule '" + name + "' edits unknown name '" + missing[0] + "'");
      }
      for (const auto &[cap, words_] : guards) {
        if (!rule.pattern.captures().count(cap)) {
          fail("rule '" + name + "' guards unknown capture '" + cap + "'");
        }
      }
      bool names_answer = false;
      for (const auto &edit : rule.script.edits()) {
        if (const auto *ins = std::get_if<InsertEdit>(&edit)) {
          for (const auto &[n, a] : ins->names) names_answer |= n == "answer";
        }
      }
      if (!names_answer) {
        fail("rule '" + name + "' never inserts a node named 'answer'");
      }
      set.rules_.push_back(std::move(rule));
      rule_start = 0;
    } else if (kw == "rule" || kw == "version") {
      fail("rule '" + name + "' is missing 'end'");
    } else {
      script_text += line;
      script_text += '\n';
    }
  }
  if (rule_start) {
    lineno = rule_start;
    fail("rule '" + name + "' is missing 'end'");
  }
  if (set.version_ == 0) fail("missing 'version'");
  return set;
}

// ---------------------------------------------------------------------------
// Slots

struct SlotDescriptor {
  enum class Kind { kPreposition, kDeterminer };
  Kind kind;
  bool open = false;
  // A word the question already provides for this slot (e.g. "in" from
  // "in what year"); empty when the slot is open or needs nothing.
  std::string supplied;
  std::string reason;
};

namespace lexicon {

inline const std::vector<std::string> &WhWords() {
  static const std::vector<std::string> v = {"what",  "who",   "whom",
                                             "whose", "when",  "where",
                                             "which", "why",   "how"};
  return v;
}
inline const std::vector<std::string> &Pronouns() {
  static const std::vector<std::string> v = {"he", "she", "it", "they"};
  return v;
}
inline const std::vector<std::string> &Prepositions() {
  static const std::vector<std::string> v = {"in",   "on",   "at",    "of",
                                             "for",  "from", "to",    "by",
                                             "with", "about", "during", "as"};
  return v;
}
inline const std::vector<std::string> &Determiners() {
  static const std::vector<std::string> v = {"the", "a", "an"};
  return v;
}

inline bool Contains(const std::vector<std::string> &v, std::string_view w) {
  return std::find(v.begin(), v.end(), w) != v.end();
}

inline bool IsPreposition(std::string_view w) {
  static const std::vector<std::string> extra = {
      "into",   "onto",   "under",  "over",    "since",  "until",
      "after",  "before", "near",   "inside",  "within", "across",
      "through", "between", "among", "around", "via",    "against",
      "behind", "beyond", "toward", "towards", "upon",   "without"};
  return Contains(Prepositions(), w) || Contains(extra, w);
}

inline bool IsDeterminerLike(std::string_view w) {
  static const std::vector<std::string> v = {
      "the", "a",    "an",    "this",  "that",    "these", "those",
      "his", "her",  "its",   "their", "my",      "your",  "our",
      "some", "any", "no",    "every", "each",    "another", "both",
      "all",  "several", "many", "few", "much"};
  return Contains(v, w);
}

inline bool IsNumberWord(std::string_view w) {
  static const std::vector<std::string> v = {
      "one",   "two",    "three",  "four",    "five",     "six",
      "seven", "eight",  "nine",   "ten",     "eleven",   "twelve",
      "twenty", "hundred", "thousand", "million", "billion", "half"};
  if (Contains(v, w)) return true;
  return std::any_of(w.begin(), w.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c));
  });
}

}  // namespace lexicon

inline bool HasWhWord(const std::vector<std::string> &question) {
  for (const auto &t : question) {
    if (lexicon::Contains(lexicon::WhWords(), ToLower(t))) return true;
  }
  return false;
}

namespace internal {

inline const ParseTree *FindChild(const ParseTree &node,
                                  std::string_view prefix) {
  for (const auto &c : node.children()) {
    if (c.label().rfind(prefix, 0) == 0) return &c;
  }
  return nullptr;
}

// A stranded preposition ends the clause: "what did he talk about".
inline bool EndsWithStrandedPreposition(const ParseTree &clause) {
  auto leaves = Leaves(clause);
  while (!leaves.empty() && leaves.back().tag == ".") leaves.pop_back();
  if (leaves.empty()) return false;
  const auto &tag = leaves.back().tag;
  return tag == "IN" || tag == "TO";
}

}  // namespace internal

// Describes the preposition and determiner slots in front of the answer. The
// result always holds one preposition slot followed by one determiner slot.
inline std::vector<SlotDescriptor> FindPrepDetSlots(
    const ParseTree &question_tree, const std::vector<std::string> &answer) {
  using Kind = SlotDescriptor::Kind;
  SlotDescriptor prep{Kind::kPreposition, false, "", ""};
  SlotDescriptor det{Kind::kDeterminer, false, "", ""};

  const ParseTree &top = Unwrap(question_tree);
  const ParseTree *wh = internal::FindChild(top, "WH");
  const ParseTree *sq = internal::FindChild(top, "SQ");
  const std::string first =
      answer.empty() ? std::string() : ToLower(answer.front());
  std::vector<std::string> wh_words;
  if (wh) {
    for (const auto &l : Leaves(*wh)) wh_words.push_back(ToLower(l.token));
  }
  const bool quantity = wh_words.size() >= 2 && wh_words[0] == "how";
  const bool wh_subject = sq && !internal::FindChild(*sq, "NP");

  if (lexicon::IsPreposition(first)) {
    prep.reason = "answer starts with a preposition";
  } else if (wh && wh->label() == "WHPP") {
    for (const auto &l : Leaves(*wh)) {
      if (l.tag == "IN" || l.tag == "TO") {
        prep.supplied = l.token;
        break;
      }
    }
    prep.reason = "question supplies the preposition";
  } else if (sq && internal::EndsWithStrandedPreposition(*sq)) {
    prep.reason = "stranded preposition";
  } else if (!wh) {
    prep.reason = "no WH phrase";
  } else if (wh_subject) {
    prep.reason = "answer fills the subject";
  } else if (quantity) {
    prep.reason = "quantity question";
  } else if (wh->label() == "WHNP" && Leaves(*wh).size() == 1) {
    prep.reason = "answer fills an argument";
  } else if (std::find(wh_words.begin(), wh_words.end(), "whose") !=
             wh_words.end()) {
    prep.reason = "possessive question";
  } else {
    prep.open = true;
    prep.reason = "no preposition connects the answer";
  }

  if (first.empty()) {
    det.reason = "empty answer";
  } else if (lexicon::IsDeterminerLike(first)) {
    det.reason = "answer carries its determiner";
  } else if (lexicon::IsNumberWord(first)) {
    det.reason = "numeric answer";
  } else if (lexicon::IsPreposition(first)) {
    det.reason = "answer starts with a preposition";
  } else if (quantity) {
    det.reason = "quantity question";
  } else {
    det.open = true;
    det.reason = "answer has no determiner";
  }
  return {prep, det};
}

// ---------------------------------------------------------------------------
// Generation

struct GenerateOptions {
  std::size_t cap = 10000;
  std::vector<std::string> pronouns = lexicon::Pronouns();
  std::vector<std::string> prepositions = lexicon::Prepositions();
  std::vector<std::string> determiners = lexicon::Determiners();
};

struct GenerationResult {
  std::vector<CandidateResponse> candidates;
  bool truncated = false;
  bool fallback = false;
};

namespace internal {

inline std::string TagAnswerToken(const std::string &token) {
  const std::string w = ToLower(token);
  if (lexicon::IsNumberWord(w)) return "CD";
  if (w == "to") return "TO";
  if (lexicon::IsPreposition(w)) return "IN";
  if (w == "his" || w == "her" || w == "its" || w == "their" || w == "my" ||
      w == "your" || w == "our") {
    return "PRP$";
  }
  if (lexicon::IsDeterminerLike(w)) return "DT";
  if (std::isupper(static_cast<unsigned char>(token[0]))) return "NNP";
  return "NN";
}

inline ParseTree FlatTree(const std::vector<std::string> &tokens) {
  std::vector<ParseTree> leaves;
  for (const auto &t : tokens) leaves.push_back(ParseTree::Leaf("XX", t));
  return ParseTree::Node("FRAG", std::move(leaves));
}

// (PP (IN prep) (NP (DT det) answer...)) with the optional parts omitted.
inline ParseTree AnswerTree(const std::vector<std::string> &answer,
                            const std::string &prep, const std::string &det) {
  std::vector<std::string> words = answer;
  std::string lead = prep;
  if (lead.empty() && words.size() > 1 && lexicon::IsPreposition(ToLower(words[0]))) {
    lead = words[0];
    words.erase(words.begin());
  }
  std::vector<ParseTree> np;
  if (!det.empty()) np.push_back(ParseTree::Leaf("DT", det));
  for (const auto &w : words) np.push_back(ParseTree::Leaf(TagAnswerToken(w), w));
  ParseTree noun_phrase = ParseTree::Node("NP", std::move(np));
  if (lead.empty()) return noun_phrase;
  std::vector<ParseTree> pp;
  pp.push_back(ParseTree::Leaf(ToLower(lead) == "to" ? "TO" : "IN", lead));
  pp.push_back(std::move(noun_phrase));
  return ParseTree::Node("PP", std::move(pp));
}

inline ParseTree StripPunctuation(const ParseTree &tree) {
  static const TreePattern kPunct = TreePattern::Compile("/^[.]$/=punct");
  static const SurgeryScript kDelete = SurgeryScript::Parse("delete punct");
  if (!FirstMatch(kPunct, tree)) return tree;
  try {
    return ApplySurgery(tree, kPunct, kDelete, {.repeat = true});
  } catch (const Error &) {
    return tree;
  }
}

class CandidateSink {
 public:
  explicit CandidateSink(std::size_t cap) : cap_(cap) {}

  // Returns false once the cap is reached and a further distinct candidate
  // was offered.
  bool Offer(CandidateResponse c) {
    std::string key = JoinTokens(c.tokens);
    if (seen_.count(key)) return true;
    if (out_.size() >= cap_) {
      truncated_ = true;
      return false;
    }
    seen_.insert(std::move(key));
    out_.push_back(std::move(c));
    return true;
  }

  bool truncated() const { return truncated_; }
  std::vector<CandidateResponse> Take() { return std::move(out_); }
  std::size_t size() const { return out_.size(); }

 private:
  std::size_t cap_;
  bool truncated_ = false;
  std::unordered_set<std::string> seen_;
  std::vector<CandidateResponse> out_;
};

struct Skeleton {
  const StRule *rule;
  SurgeryResult surgery;
  std::optional<TenseDirective> directive;
  std::string aux_word;
};

inline std::optional<Skeleton> BuildSkeleton(const StRule &rule,
                                             const ParseTree &question) {
  for (const auto &m : Match(rule.pattern, question)) {
    bool ok = true;
    for (const auto &[cap, accepted] : rule.guards) {
      const ParseTree &node = question.at(m[cap]);
      if (!node.is_leaf() || !accepted.count(ToLower(node.token()))) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    Skeleton sk{&rule, {question, {}}, std::nullopt, ""};
    try {
      sk.surgery = ApplySurgeryAt(question, m, rule.script);
    } catch (const Error &e) {
      if (e.kind() == ErrorKind::kInvalidEditTarget) continue;
      throw;
    }
    if (!sk.surgery.names.count("answer")) continue;
    if (m.has("aux")) {
      const ParseTree &aux = question.at(m["aux"]);
      if (aux.is_leaf()) {
        sk.aux_word = ToLower(aux.token());
        try {
          sk.directive = AuxToTargetTense(sk.aux_word);
        } catch (const Error &) {
          sk.directive.reset();
        }
      }
    }
    return sk;
  }
  return std::nullopt;
}

struct SubjectOption {
  std::string pronoun;  // empty: keep the original subject
  Agreement agreement;
};

// Expands one skeleton into the sink. Returns false if the sink filled up.
inline bool ExpandSkeleton(const Skeleton &sk, const QAInstance &inst,
                           const std::vector<SlotDescriptor> &slots,
                           const GenerateOptions &opts, CandidateSink &sink) {
  const ParseTree &tree = sk.surgery.tree;
  const auto &names = sk.surgery.names;
  const TreeAddress answer_addr = names.at("answer");

  std::optional<TreeAddress> subj;
  if (auto it = names.find("subj"); it != names.end() &&
                                    tree.at(it->second).label() == "NP" &&
                                    !it->second.dominates(answer_addr)) {
    subj = it->second;
  }
  std::optional<TreeAddress> verb;
  if (auto it = names.find("verb");
      it != names.end() && tree.at(it->second).is_leaf()) {
    verb = it->second;
  }
  const bool inflect =
      verb && sk.directive &&
      (*sk.directive == TenseDirective::kPast ||
       *sk.directive == TenseDirective::kPresent ||
       *sk.directive == TenseDirective::kFuture);

  std::vector<SubjectOption> subjects;
  if (subj) {
    subjects.push_back({"", InferAgreement(tree.at(*subj))});
    auto original = LeafTokens(tree.at(*subj));
    for (const auto &p : opts.pronouns) {
      if (original.size() == 1 && ToLower(original[0]) == p) continue;
      Agreement a{Person::kThird,
                  p == "they" ? Number::kPlural : Number::kSingular};
      subjects.push_back({p, a});
    }
  } else {
    subjects.push_back({"", {}});
  }

  // Optional PPs: maximal PP nodes outside the subject and the answer that
  // hold no named node themselves.
  std::vector<TreeAddress> pps;
  Preorder(tree, [&](const ParseTree &node, const TreeAddress &addr) {
    if (node.label() != "PP") return;
    for (const auto &p : pps) {
      if (p.dominates(addr)) return;
    }
    if (subj && subj->dominates(addr)) return;
    if (answer_addr.dominates(addr)) return;
    for (const auto &[n, a] : names) {
      if (a == addr || addr.dominates(a)) return;
    }
    pps.push_back(addr);
  });

  std::vector<std::string> prep_options{""};
  std::vector<std::string> det_options{""};
  std::string supplied_prep;
  for (const auto &s : slots) {
    if (s.kind == SlotDescriptor::Kind::kPreposition) {
      if (s.open) {
        prep_options.insert(prep_options.end(), opts.prepositions.begin(),
                            opts.prepositions.end());
      } else {
        supplied_prep = s.supplied;
      }
    } else if (s.open) {
      det_options.insert(det_options.end(), opts.determiners.begin(),
                         opts.determiners.end());
    }
  }

  MatchResult base;
  base.captures = names;
  for (std::size_t i = 0; i < pps.size(); ++i) {
    base.captures["pp" + std::to_string(i)] = pps[i];
  }

  const std::size_t masks = pps.size() >= 20 ? (std::size_t{1} << 20)
                                             : (std::size_t{1} << pps.size());

  for (const auto &so : subjects) {
    // Verb re-inflection depends only on the subject choice.
    std::vector<SurgeryEdit> verb_edits;
    std::vector<std::string> verb_trace;
    if (inflect) {
      const ParseTree &v = tree.at(*verb);
      VerbForm form{ToLower(v.token()), Tense::kPresent, so.agreement.person,
                    so.agreement.number};
      if (*sk.directive == TenseDirective::kFuture) {
        verb_edits.push_back(InsertEdit{ParseTree::Leaf("MD", "will"), {},
                                        {EditPosition::Kind::kLeftSisterOf, -1,
                                         "verb"}});
        verb_edits.push_back(InsertEdit{ParseTree::Leaf("VB", form.base), {},
                                        {EditPosition::Kind::kLeftSisterOf, -1,
                                         "verb"}});
      } else {
        form.tense = *sk.directive == TenseDirective::kPast ? Tense::kPast
                                                            : Tense::kPresent;
        const bool third_sg = so.agreement.person == Person::kThird &&
                              so.agreement.number == Number::kSingular;
        std::string tag = form.tense == Tense::kPast ? "VBD"
                          : third_sg                  ? "VBZ"
                                                      : "VBP";
        verb_edits.push_back(InsertEdit{
            ParseTree::Leaf(tag, MatchCase(v.token(), Conjugate(form))),
            {},
            {EditPosition::Kind::kLeftSisterOf, -1, "verb"}});
      }
      verb_edits.push_back(DeleteEdit{"verb"});
      verb_trace.push_back("verb-mod");
    } else if (sk.directive == TenseDirective::kKeepModal) {
      verb_trace.push_back("modal-kept");
    } else if (sk.directive == TenseDirective::kCopyAux) {
      verb_trace.push_back("aux-copied");
      if (sk.aux_word == "had") verb_trace.push_back("perfect-had");
    }

    for (const auto &prep : prep_options) {
      for (const auto &det : det_options) {
        for (std::size_t mask = 0; mask < masks; ++mask) {
          std::vector<SurgeryEdit> edits;
          for (std::size_t i = 0; i < pps.size() && i < 20; ++i) {
            if (mask & (std::size_t{1} << i)) {
              edits.push_back(DeleteEdit{"pp" + std::to_string(i)});
            }
          }
          const std::string lead = prep.empty() ? supplied_prep : prep;
          edits.push_back(InsertEdit{AnswerTree(inst.answer, lead, det), {},
                                     {EditPosition::Kind::kLeftSisterOf, -1,
                                      "answer"}});
          edits.push_back(DeleteEdit{"answer"});
          if (!so.pronoun.empty()) {
            edits.push_back(InsertEdit{
                ParseTree::Node("NP", {ParseTree::Leaf("PRP", so.pronoun)}),
                {},
                {EditPosition::Kind::kLeftSisterOf, -1, "subj"}});
            edits.push_back(DeleteEdit{"subj"});
          }
          edits.insert(edits.end(), verb_edits.begin(), verb_edits.end());

          std::optional<SurgeryResult> r;
          try {
            r = ApplySurgeryAt(tree, base, SurgeryScript(std::move(edits)));
          } catch (const Error &e) {
            if (e.kind() == ErrorKind::kInvalidEditTarget) continue;
            throw;
          }

          CandidateResponse c{LeafTokens(r->tree), std::move(r->tree),
                              {"rule=" + sk.rule->name}};
          c.trace.insert(c.trace.end(), verb_trace.begin(), verb_trace.end());
          if (!so.pronoun.empty()) c.trace.push_back("pronoun=" + so.pronoun);
          if (!prep.empty()) c.trace.push_back("prep=" + prep);
          if (!det.empty()) c.trace.push_back("det=" + det);
          if (mask != 0) c.trace.push_back("pp-removed");
          if (!sink.Offer(std::move(c))) return false;
        }
      }
    }
  }
  return true;
}

}  // namespace internal

inline CandidateResponse AnswerOnlyCandidate(const QAInstance &inst,
                                             const std::string &tag) {
  return {inst.answer, internal::FlatTree(inst.answer), {tag}};
}

inline GenerationResult Generate(const QAInstance &inst, const RuleSet &rules,
                                 const GenerateOptions &opts = {}) {
  GenerationResult result;
  const ParseTree &top = Unwrap(inst.question_tree);
  if (top.label() != "SBARQ" || !HasWhWord(inst.question) || opts.cap == 0) {
    result.fallback = true;
    result.candidates.push_back(AnswerOnlyCandidate(inst, "fallback"));
    return result;
  }

  const ParseTree question = internal::StripPunctuation(top);
  const auto slots = FindPrepDetSlots(inst.question_tree, inst.answer);

  internal::CandidateSink sink(opts.cap);
  sink.Offer(AnswerOnlyCandidate(inst, "answer-only"));
  bool any_rule = false;
  for (const auto &rule : rules.rules()) {
    auto sk = internal::BuildSkeleton(rule, question);
    if (!sk) continue;
    any_rule = true;
    if (!internal::ExpandSkeleton(*sk, inst, slots, opts, sink)) break;
  }
  if (!any_rule) {
    result.fallback = true;
    result.candidates.push_back(AnswerOnlyCandidate(inst, "fallback"));
    return result;
  }
  result.truncated = sink.truncated();
  result.candidates = sink.Take();
  return result;
}

}  // namespace fluentqa

#endif  // FLUENTQA_STGEN_HPP_
