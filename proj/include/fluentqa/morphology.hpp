// morphology.hpp
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
// English verb inflection for response generation.

#ifndef FLUENTQA_MORPHOLOGY_HPP_
#define FLUENTQA_MORPHOLOGY_HPP_

#include <algorithm>
#include <cctype>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fluentqa/bundled_data.hpp"
#include "fluentqa/error.hpp"
#include "fluentqa/treebank.hpp"

namespace fluentqa {

enum class Tense { kPast, kPresent, kFuture };
enum class Person { kFirst, kSecond, kThird };
enum class Number { kSingular, kPlural };

struct VerbForm {
  std::string base;
  Tense tense = Tense::kPresent;
  Person person = Person::kThird;
  Number number = Number::kSingular;
};

struct IrregularForms {
  std::string past;
  std::string past_participle;
  std::string third_singular;
};

inline std::string ToLower(std::string_view s) {
  std::string out(s);
  for (auto &c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

class IrregularTable {
 public:
  // Reads "lemma<TAB>past<TAB>past-participle<TAB>third-singular" lines.
  // Blank lines and lines starting with '#' are skipped.
  static IrregularTable FromTsv(std::istream &in) {
    IrregularTable table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      std::vector<std::string> cols;
      std::stringstream ss(line);
      std::string col;
      while (std::getline(ss, col, '\t')) cols.push_back(col);
      if (cols.size() != 4 || cols[0].empty()) {
        throw Error(ErrorKind::kDataError,
                    "irregular verb table needs 4 columns", lineno);
      }
      table.forms_[ToLower(cols[0])] = {cols[1], cols[2], cols[3]};
    }
    return table;
  }

  static const IrregularTable &Bundled() {
    static const IrregularTable table = [] {
      std::istringstream in{std::string(bundled::kIrregularVerbsTsv)};
      return FromTsv(in);
    }();
    return table;
  }

  const IrregularForms *Find(std::string_view lemma) const {
    auto it = forms_.find(std::string(lemma));
    return it == forms_.end() ? nullptr : &it->second;
  }
  std::size_t size() const { return forms_.size(); }
  const std::map<std::string, IrregularForms> &entries() const {
    return forms_;
  }

 private:
  std::map<std::string, IrregularForms> forms_;
};

namespace internal {

inline bool IsVowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

inline bool EndsWith(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

inline int VowelGroups(std::string_view w) {
  int groups = 0;
  bool in_vowel = false;
  for (char c : w) {
    bool v = IsVowel(c);
    if (v && !in_vowel) ++groups;
    in_vowel = v;
  }
  return groups;
}

// stop -> true, rain -> false, visit -> false, fix -> false.
inline bool DoublesFinalConsonant(std::string_view w) {
  if (w.size() < 3 || VowelGroups(w) != 1) return false;
  char c1 = w[w.size() - 3], v = w[w.size() - 2], c2 = w.back();
  if (IsVowel(c1) || !IsVowel(v) || IsVowel(c2)) return false;
  return c2 != 'w' && c2 != 'x' && c2 != 'y';
}

inline std::string RegularPast(const std::string &w) {
  if (EndsWith(w, "e")) return w + "d";
  if (w.size() >= 2 && w.back() == 'y' && !IsVowel(w[w.size() - 2])) {
    return w.substr(0, w.size() - 1) + "ied";
  }
  if (DoublesFinalConsonant(w)) return w + w.back() + "ed";
  return w + "ed";
}

inline std::string RegularThirdSingular(const std::string &w) {
  if (w.size() >= 2 && w.back() == 'y' && !IsVowel(w[w.size() - 2])) {
    return w.substr(0, w.size() - 1) + "ies";
  }
  for (std::string_view s : {"s", "x", "z", "ch", "sh", "o"}) {
    if (EndsWith(w, s)) return w + "es";
  }
  return w + "s";
}

}  // namespace internal

inline std::string Conjugate(const VerbForm &form,
                             const IrregularTable &table =
                                 IrregularTable::Bundled()) {
  const std::string base = ToLower(form.base);
  const bool third_sg =
      form.person == Person::kThird && form.number == Number::kSingular;
  const bool first_sg =
      form.person == Person::kFirst && form.number == Number::kSingular;

  switch (form.tense) {
    case Tense::kFuture:
      return "will " + base;
    case Tense::kPresent:
      if (base == "be") return first_sg ? "am" : third_sg ? "is" : "are";
      if (!third_sg) return base;
      if (const auto *irr = table.Find(base)) return irr->third_singular;
      return internal::RegularThirdSingular(base);
    case Tense::kPast:
      if (base == "be") return (first_sg || third_sg) ? "was" : "were";
      if (const auto *irr = table.Find(base)) return irr->past;
      return internal::RegularPast(base);
  }
  return base;
}

// What an auxiliary at the front of a question implies for the response.
enum class TenseDirective {
  kPast,       // did: main verb to past
  kPresent,    // do/does: main verb to present
  kFuture,     // will: "will" + base
  kKeepModal,  // can, would, ...: modal stays, main verb stays base
  kCopyAux,    // is, has, ...: auxiliary carried over, main verb unchanged
};

inline TenseDirective AuxToTargetTense(std::string_view aux) {
  const std::string a = ToLower(aux);
  if (a == "do" || a == "does") return TenseDirective::kPresent;
  if (a == "did") return TenseDirective::kPast;
  if (a == "will" || a == "'ll") return TenseDirective::kFuture;
  static const char *const kModals[] = {"would", "can",   "could", "must",
                                        "may",   "should", "might", "shall"};
  for (const char *m : kModals) {
    if (a == m) return TenseDirective::kKeepModal;
  }
  static const char *const kBeHave[] = {"is",  "'s",  "are", "'re", "am",
                                        "'m",  "was", "were", "has", "have",
                                        "had", "'ve"};
  for (const char *b : kBeHave) {
    if (a == b) return TenseDirective::kCopyAux;
  }
  throw Error(ErrorKind::kUnknownAuxiliary, "'" + std::string(aux) + "'");
}

inline bool IsAuxiliary(std::string_view word) {
  try {
    AuxToTargetTense(word);
    return true;
  } catch (const Error &) {
    return false;
  }
}

struct Agreement {
  Person person = Person::kThird;
  Number number = Number::kSingular;
};

// Person and number of a subject phrase: pronouns decide directly, otherwise
// the head noun's tag (NNS/NNPS plural) or a coordination does.
inline Agreement InferAgreement(const ParseTree &subject) {
  auto leaves = Leaves(subject);
  if (leaves.size() == 1) {
    const std::string w = ToLower(leaves[0].token);
    if (w == "i") return {Person::kFirst, Number::kSingular};
    if (w == "we") return {Person::kFirst, Number::kPlural};
    if (w == "you") return {Person::kSecond, Number::kPlural};
    if (w == "they") return {Person::kThird, Number::kPlural};
  }
  const ParseTree *node = &subject;
  while (!node->is_leaf()) {
    const ParseTree *head = nullptr;
    for (const auto &c : node->children()) {
      if (c.is_leaf() && c.label() == "CC") return {Person::kThird, Number::kPlural};
    }
    for (const auto &c : node->children()) {
      if (c.is_leaf() && (c.label().rfind("NN", 0) == 0 || c.label() == "PRP")) {
        head = &c;
      }
    }
    if (head) {
      node = head;
      break;
    }
    node = node->child(0).label() == "NP" ? &node->child(0)
                                          : &node->children().back();
  }
  if (node->label() == "NNS" || node->label() == "NNPS") {
    return {Person::kThird, Number::kPlural};
  }
  return {Person::kThird, Number::kSingular};
}

// Copies the capitalization of `model`'s first letter onto `word`.
inline std::string MatchCase(const std::string &model, std::string word) {
  if (!model.empty() && !word.empty() &&
      std::isupper(static_cast<unsigned char>(model[0]))) {
    word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
  }
  return word;
}

}  // namespace fluentqa

#endif  // FLUENTQA_MORPHOLOGY_HPP_
