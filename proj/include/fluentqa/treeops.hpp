// treeops.hpp
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
// Tree pattern matching and tree surgery over ParseTree.
//
// Pattern language (a small Tregex subset):
//
//   pattern  := node { ['!'] relation target }
//   node     := ( '__' | '/regex/' | label {'|' label} ) [ '=' name ]
//   target   := node | '(' pattern ')'
//   relation := '<'   A < B    B is a child of A
//             | '<<'  A << B   B is a proper descendant of A
//             | '$+'  A $+ B   B is the immediate right sister of A
//             | '.'   A . B    the last leaf of A is directly followed by
//                              the first leaf of B
//
// Relations in a chain all apply to the head node: "A < B < C" means A has a
// child B and a child C. Regexes use ECMAScript syntax with search
// semantics. Captures inside a negated relation are never bound.
//
// Surgery scripts hold one edit per line (or separated by ';'):
//
//   delete  <name>              remove the node; emptied ancestors are pruned
//   excise  <name>              replace the node by its children
//   relabel <name> <label>
//   insert  <tree> <position>   tree is PTB; "LABEL=name" names a new node
//   move    <name> <position>
//
//   position := '$+' name   as the left sister of name
//             | '$-' name   as the right sister of name
//             | '>i' name   as the i-th child (1-based)
//             | '>-i' name  as the i-th child from the end (-1 appends)

#ifndef FLUENTQA_TREEOPS_HPP_
#define FLUENTQA_TREEOPS_HPP_

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "fluentqa/error.hpp"
#include "fluentqa/treebank.hpp"

namespace fluentqa {

enum class Relation { kChild, kDescendant, kRightSister, kPrecedes };

inline std::string_view RelationSymbol(Relation r) {
  switch (r) {
    case Relation::kChild: return "<";
    case Relation::kDescendant: return "<<";
    case Relation::kRightSister: return "$+";
    case Relation::kPrecedes: return ".";
  }
  return "?";
}

struct MatchResult {
  TreeAddress node;
  std::map<std::string, TreeAddress> captures;

  const TreeAddress &operator[](const std::string &name) const {
    auto it = captures.find(name);
    if (it == captures.end()) {
      throw std::out_of_range("no capture named '" + name + "'");
    }
    return it->second;
  }
  bool has(const std::string &name) const { return captures.count(name) > 0; }
  bool operator==(const MatchResult &) const = default;
};

namespace internal {

struct PatternNode;

struct PatternRelation {
  Relation relation;
  bool negated = false;
  std::shared_ptr<const PatternNode> target;
};

struct PatternNode {
  enum class Kind { kAny, kLabels, kRegex };
  Kind kind = Kind::kAny;
  std::vector<std::string> labels;
  std::string regex_source;
  std::regex regex;
  std::optional<std::string> capture;
  std::vector<PatternRelation> relations;

  bool Accepts(const std::string &label) const {
    switch (kind) {
      case Kind::kAny: return true;
      case Kind::kLabels:
        return std::find(labels.begin(), labels.end(), label) != labels.end();
      case Kind::kRegex: return std::regex_search(label, regex);
    }
    return false;
  }
};

class PatternParser {
 public:
  explicit PatternParser(std::string_view text) : text_(text) {}

  std::shared_ptr<const PatternNode> Parse(std::set<std::string> *captures) {
    captures_ = captures;
    auto root = ParsePattern();
    SkipSpace();
    if (pos_ != text_.size()) Fail("unexpected trailing input");
    return root;
  }

 private:
  [[noreturn]] void Fail(const std::string &msg) const {
    throw Error(ErrorKind::kPatternSyntax,
                msg + " at offset " + std::to_string(pos_) + " in '" +
                    std::string(text_) + "'");
  }

  void SkipSpace() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool AtRelation() {
    SkipSpace();
    if (pos_ >= text_.size()) return false;
    char c = text_[pos_];
    if (c == '!' || c == '<' || c == '.') return true;
    return c == '$' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '+';
  }

  static bool IsLabelChar(char c) {
    return !(std::isspace(static_cast<unsigned char>(c)) || c == '(' ||
             c == ')' || c == '=' || c == '|' || c == '!' || c == '<' ||
             c == '/');
  }

  std::shared_ptr<const PatternNode> ParsePattern() {
    auto node = ParseNodeDescriptor();
    while (AtRelation()) {
      PatternRelation rel;
      if (text_[pos_] == '!') {
        rel.negated = true;
        ++pos_;
        SkipSpace();
      }
      if (text_.compare(pos_, 2, "<<") == 0) {
        rel.relation = Relation::kDescendant;
        pos_ += 2;
      } else if (text_.compare(pos_, 1, "<") == 0) {
        rel.relation = Relation::kChild;
        pos_ += 1;
      } else if (text_.compare(pos_, 2, "$+") == 0) {
        rel.relation = Relation::kRightSister;
        pos_ += 2;
      } else if (text_.compare(pos_, 1, ".") == 0) {
        rel.relation = Relation::kPrecedes;
        pos_ += 1;
      } else {
        Fail("expected relation");
      }
      SkipSpace();
      if (pos_ < text_.size() && text_[pos_] == '(') {
        ++pos_;
        bool saved = in_negation_;
        in_negation_ = in_negation_ || rel.negated;
        rel.target = ParsePattern();
        in_negation_ = saved;
        SkipSpace();
        if (pos_ >= text_.size() || text_[pos_] != ')') Fail("expected ')'");
        ++pos_;
      } else {
        bool saved = in_negation_;
        in_negation_ = in_negation_ || rel.negated;
        rel.target = ParseNodeDescriptor();
        in_negation_ = saved;
      }
      node->relations.push_back(std::move(rel));
    }
    return node;
  }

  std::shared_ptr<PatternNode> ParseNodeDescriptor() {
    SkipSpace();
    auto node = std::make_shared<PatternNode>();
    if (pos_ >= text_.size()) Fail("expected node description");
    if (text_[pos_] == '/') {
      std::size_t end = pos_ + 1;
      std::string source;
      while (end < text_.size() && text_[end] != '/') {
        if (text_[end] == '\\' && end + 1 < text_.size() &&
            text_[end + 1] == '/') {
          source += '/';
          end += 2;
          continue;
        }
        source += text_[end++];
      }
      if (end >= text_.size()) Fail("unterminated regex");
      node->kind = PatternNode::Kind::kRegex;
      node->regex_source = source;
      try {
        node->regex = std::regex(source, std::regex::ECMAScript);
      } catch (const std::regex_error &e) {
        Fail(std::string("bad regex: ") + e.what());
      }
      pos_ = end + 1;
    } else {
      std::vector<std::string> alternatives;
      while (true) {
        std::size_t start = pos_;
        // '.' is a label character here; as a relation it must follow
        // whitespace.
        while (pos_ < text_.size() && IsLabelChar(text_[pos_])) ++pos_;
        if (pos_ == start) Fail("expected label");
        alternatives.emplace_back(text_.substr(start, pos_ - start));
        if (pos_ < text_.size() && text_[pos_] == '|') {
          ++pos_;
          continue;
        }
        break;
      }
      if (alternatives.size() == 1 && alternatives[0] == "__") {
        node->kind = PatternNode::Kind::kAny;
      } else {
        node->kind = PatternNode::Kind::kLabels;
        node->labels = std::move(alternatives);
      }
    }
    if (pos_ < text_.size() && text_[pos_] == '=') {
      ++pos_;
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_')) {
        ++pos_;
      }
      if (pos_ == start) Fail("expected capture name after '='");
      std::string name(text_.substr(start, pos_ - start));
      if (!captures_->insert(name).second) {
        Fail("duplicate capture name '" + name + "'");
      }
      if (!in_negation_) node->capture = name;
    }
    return node;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  bool in_negation_ = false;
  std::set<std::string> *captures_ = nullptr;
};

// Flat preorder index of a tree used by the matcher.
struct IndexedTree {
  struct Entry {
    const ParseTree *node;
    TreeAddress address;
    std::ptrdiff_t parent;
    std::size_t child_index;
    std::size_t subtree_end;  // one past the last preorder index inside
    std::size_t first_leaf;
    std::size_t last_leaf;
    std::vector<std::size_t> children;
  };
  std::vector<Entry> nodes;

  explicit IndexedTree(const ParseTree &tree) {
    std::size_t leaf_counter = 0;
    TreeAddress addr;
    Build(tree, -1, 0, addr, leaf_counter);
  }

 private:
  std::size_t Build(const ParseTree &node, std::ptrdiff_t parent,
                    std::size_t child_index, TreeAddress &addr,
                    std::size_t &leaf_counter) {
    std::size_t me = nodes.size();
    nodes.push_back({&node, addr, parent, child_index, 0, 0, 0, {}});
    if (node.is_leaf()) {
      nodes[me].first_leaf = nodes[me].last_leaf = leaf_counter++;
    } else {
      for (std::size_t i = 0; i < node.num_children(); ++i) {
        addr.path.push_back(i);
        std::size_t c = Build(node.child(i), static_cast<std::ptrdiff_t>(me),
                              i, addr, leaf_counter);
        addr.path.pop_back();
        nodes[me].children.push_back(c);
      }
      nodes[me].first_leaf = nodes[nodes[me].children.front()].first_leaf;
      nodes[me].last_leaf = nodes[nodes[me].children.back()].last_leaf;
    }
    nodes[me].subtree_end = nodes.size();
    return me;
  }
};

class Matcher {
 public:
  using Bindings = std::map<std::string, std::size_t>;
  // Return true from the continuation to stop the search.
  using Continuation = std::function<bool(Bindings &)>;

  explicit Matcher(const IndexedTree &index) : index_(index) {}

  bool MatchAt(const PatternNode &p, std::size_t n, Bindings &b,
               const Continuation &k) const {
    const auto &entry = index_.nodes[n];
    if (!p.Accepts(entry.node->label())) return false;
    bool bound_here = false;
    if (p.capture) {
      auto it = b.find(*p.capture);
      if (it != b.end() && it->second != n) return false;
      if (it == b.end()) {
        b.emplace(*p.capture, n);
        bound_here = true;
      }
    }
    bool stop = MatchRelations(p, 0, n, b, k);
    if (bound_here) b.erase(*p.capture);
    return stop;
  }

  std::vector<std::size_t> Candidates(Relation r, std::size_t n) const {
    const auto &e = index_.nodes[n];
    std::vector<std::size_t> out;
    switch (r) {
      case Relation::kChild:
        out = e.children;
        break;
      case Relation::kDescendant:
        for (std::size_t i = n + 1; i < e.subtree_end; ++i) out.push_back(i);
        break;
      case Relation::kRightSister:
        if (e.parent >= 0) {
          const auto &sibs =
              index_.nodes[static_cast<std::size_t>(e.parent)].children;
          if (e.child_index + 1 < sibs.size()) {
            out.push_back(sibs[e.child_index + 1]);
          }
        }
        break;
      case Relation::kPrecedes:
        for (std::size_t i = 0; i < index_.nodes.size(); ++i) {
          if (index_.nodes[i].first_leaf == e.last_leaf + 1) out.push_back(i);
        }
        break;
    }
    return out;
  }

 private:
  bool MatchRelations(const PatternNode &p, std::size_t i, std::size_t n,
                      Bindings &b, const Continuation &k) const {
    if (i == p.relations.size()) return k(b);
    const auto &rel = p.relations[i];
    auto cands = Candidates(rel.relation, n);
    if (rel.negated) {
      for (std::size_t c : cands) {
        Bindings scratch = b;
        bool found = MatchAt(*rel.target, c, scratch,
                             [](Bindings &) { return true; });
        if (found) return false;
      }
      return MatchRelations(p, i + 1, n, b, k);
    }
    for (std::size_t c : cands) {
      bool stop = MatchAt(*rel.target, c, b, [&](Bindings &bb) {
        return MatchRelations(p, i + 1, n, bb, k);
      });
      if (stop) return true;
    }
    return false;
  }

  const IndexedTree &index_;
};

}  // namespace internal

class TreePattern {
 public:
  static TreePattern Compile(std::string_view expression) {
    TreePattern p;
    p.expression_ = std::string(expression);
    p.root_ = internal::PatternParser(expression).Parse(&p.captures_);
    return p;
  }

  const std::string &expression() const { return expression_; }
  // Every capture name in the expression, including ones under negation.
  const std::set<std::string> &captures() const { return captures_; }
  const internal::PatternNode &root() const { return *root_; }

 private:
  TreePattern() = default;
  std::string expression_;
  std::set<std::string> captures_;
  std::shared_ptr<const internal::PatternNode> root_;
};

// All matches in preorder of the head node; for a given head, bindings are
// enumerated in the order the relations are written, each relation's
// candidates in preorder. Identical (head, captures) results are reported
// once.
inline std::vector<MatchResult> Match(const TreePattern &pattern,
                                      const ParseTree &tree,
                                      std::size_t limit = 0) {
  internal::IndexedTree index(tree);
  internal::Matcher matcher(index);
  std::vector<MatchResult> out;
  std::set<std::pair<std::size_t, std::map<std::string, std::size_t>>> seen;
  for (std::size_t n = 0; n < index.nodes.size(); ++n) {
    internal::Matcher::Bindings b;
    bool stop = matcher.MatchAt(pattern.root(), n, b, [&](auto &bindings) {
      if (!seen.emplace(n, bindings).second) return false;
      MatchResult m;
      m.node = index.nodes[n].address;
      for (const auto &[name, idx] : bindings) {
        m.captures.emplace(name, index.nodes[idx].address);
      }
      out.push_back(std::move(m));
      return limit != 0 && out.size() >= limit;
    });
    if (stop) break;
  }
  return out;
}

inline std::optional<MatchResult> FirstMatch(const TreePattern &pattern,
                                             const ParseTree &tree) {
  auto all = Match(pattern, tree, 1);
  if (all.empty()) return std::nullopt;
  return all.front();
}

// ---------------------------------------------------------------------------
// Surgery

struct EditPosition {
  enum class Kind { kLeftSisterOf, kRightSisterOf, kChildOf };
  Kind kind = Kind::kChildOf;
  // 1-based; negative counts from the end, -1 meaning "after the last".
  int child_index = -1;
  std::string anchor;
};

struct DeleteEdit {
  std::string target;
};
struct ExciseEdit {
  std::string target;
};
struct RelabelEdit {
  std::string target;
  std::string label;
};
struct InsertEdit {
  ParseTree subtree;
  // Names attached to nodes of `subtree` via LABEL=name, with their address
  // relative to the subtree root.
  std::vector<std::pair<std::string, TreeAddress>> names;
  EditPosition where;
};
struct MoveEdit {
  std::string target;
  EditPosition where;
};

using SurgeryEdit =
    std::variant<DeleteEdit, ExciseEdit, RelabelEdit, InsertEdit, MoveEdit>;

class SurgeryScript {
 public:
  SurgeryScript() = default;
  explicit SurgeryScript(std::vector<SurgeryEdit> edits)
      : edits_(std::move(edits)) {}

  static SurgeryScript Parse(std::string_view text);

  const std::vector<SurgeryEdit> &edits() const { return edits_; }

  // Names an edit refers to that are neither pattern captures nor introduced
  // by an earlier insert.
  std::vector<std::string> UnresolvedNames(const TreePattern &pattern) const;

 private:
  std::vector<SurgeryEdit> edits_;
};

namespace internal {

inline std::vector<std::string> SplitWords(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

// Parses "LABEL=name" annotations out of a PTB literal.
inline ParseTree StripNames(const ParseTree &t, TreeAddress &addr,
                            std::vector<std::pair<std::string, TreeAddress>>
                                &names) {
  std::string label = t.label();
  std::size_t eq = label.find('=');
  if (eq != std::string::npos && eq > 0) {
    names.emplace_back(label.substr(eq + 1), addr);
    label = label.substr(0, eq);
  }
  if (t.is_leaf()) return ParseTree::Leaf(label, t.token());
  std::vector<ParseTree> kids;
  for (std::size_t i = 0; i < t.num_children(); ++i) {
    addr.path.push_back(i);
    kids.push_back(StripNames(t.child(i), addr, names));
    addr.path.pop_back();
  }
  return ParseTree::Node(label, std::move(kids));
}

inline EditPosition ParsePosition(const std::vector<std::string> &words,
                                  std::size_t at, const std::string &line) {
  auto fail = [&](const std::string &why) {
    throw Error(ErrorKind::kPatternSyntax,
                "bad position in edit '" + line + "': " + why);
  };
  if (at + 2 != words.size()) fail("expected '<relation> <name>'");
  EditPosition pos;
  const std::string &rel = words[at];
  pos.anchor = words[at + 1];
  if (rel == "$+") {
    pos.kind = EditPosition::Kind::kLeftSisterOf;
  } else if (rel == "$-") {
    pos.kind = EditPosition::Kind::kRightSisterOf;
  } else if (rel.size() >= 2 && rel[0] == '>') {
    pos.kind = EditPosition::Kind::kChildOf;
    try {
      std::size_t used = 0;
      pos.child_index = std::stoi(rel.substr(1), &used);
      if (used != rel.size() - 1) fail("bad child index");
    } catch (const std::logic_error &) {
      fail("bad child index");
    }
    if (pos.child_index == 0) fail("child index must be non-zero");
  } else {
    fail("unknown relation '" + rel + "'");
  }
  return pos;
}

inline SurgeryEdit ParseEdit(std::string_view raw) {
  std::string line(raw);
  auto fail = [&](const std::string &why) -> SurgeryEdit {
    throw Error(ErrorKind::kPatternSyntax,
                "bad edit '" + line + "': " + why);
  };
  auto words = SplitWords(line);
  if (words.empty()) return fail("empty edit");
  const std::string &op = words[0];
  if (op == "delete" || op == "excise") {
    if (words.size() != 2) return fail("expected one name");
    if (op == "delete") return DeleteEdit{words[1]};
    return ExciseEdit{words[1]};
  }
  if (op == "relabel") {
    if (words.size() != 3) return fail("expected name and label");
    if (!IsValidLabel(words[2])) return fail("invalid label");
    return RelabelEdit{words[1], words[2]};
  }
  if (op == "move") {
    if (words.size() < 2) return fail("expected name");
    return MoveEdit{words[1], ParsePosition(words, 2, line)};
  }
  if (op == "insert") {
    std::size_t open = line.find('(');
    if (open == std::string::npos) return fail("expected tree literal");
    int depth = 0;
    std::size_t close = open;
    for (; close < line.size(); ++close) {
      if (line[close] == '(') ++depth;
      if (line[close] == ')' && --depth == 0) break;
    }
    if (close >= line.size()) return fail("unbalanced tree literal");
    ParseTree literal = [&] {
      try {
        return ParsePtb(std::string_view(line).substr(open, close - open + 1));
      } catch (const Error &e) {
        throw Error(ErrorKind::kPatternSyntax,
                    "bad tree literal in '" + line + "': " + e.what());
      }
    }();
    InsertEdit edit{literal, {}, {}};
    TreeAddress addr;
    edit.subtree = StripNames(literal, addr, edit.names);
    auto rest = SplitWords(std::string_view(line).substr(close + 1));
    edit.where = ParsePosition(rest, 0, line);
    return edit;
  }
  return fail("unknown operation '" + op + "'");
}

}  // namespace internal

inline SurgeryScript SurgeryScript::Parse(std::string_view text) {
  std::vector<SurgeryEdit> edits;
  std::string current;
  auto flush = [&] {
    auto first = current.find_first_not_of(" \t\r");
    if (first != std::string::npos && current[first] != '#') {
      edits.push_back(internal::ParseEdit(current));
    }
    current.clear();
  };
  int depth = 0;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if ((c == '\n' || c == ';') && depth == 0) {
      flush();
    } else {
      current += c;
    }
  }
  flush();
  return SurgeryScript(std::move(edits));
}

inline std::vector<std::string> SurgeryScript::UnresolvedNames(
    const TreePattern &pattern) const {
  std::set<std::string> known = pattern.captures();
  std::vector<std::string> missing;
  auto need = [&](const std::string &n) {
    if (!known.count(n)) missing.push_back(n);
  };
  for (const auto &edit : edits_) {
    std::visit(
        [&](const auto &e) {
          using T = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<T, InsertEdit>) {
            need(e.where.anchor);
            for (const auto &[n, a] : e.names) known.insert(n);
          } else if constexpr (std::is_same_v<T, MoveEdit>) {
            need(e.target);
            need(e.where.anchor);
          } else {
            need(e.target);
          }
        },
        edit);
  }
  return missing;
}

struct SurgeryResult {
  ParseTree tree;
  // Surviving named nodes (pattern captures and inserted names) located in
  // the result tree.
  std::map<std::string, TreeAddress> names;
};

namespace internal {

struct WorkNode {
  std::string label;
  std::string token;
  std::vector<std::unique_ptr<WorkNode>> kids;
  WorkNode *parent = nullptr;
  bool is_leaf() const { return kids.empty(); }
};

inline std::unique_ptr<WorkNode> ToWork(const ParseTree &t, WorkNode *parent) {
  auto w = std::make_unique<WorkNode>();
  w->label = t.label();
  w->token = t.token();
  w->parent = parent;
  for (const auto &c : t.children()) w->kids.push_back(ToWork(c, w.get()));
  return w;
}

inline ParseTree FromWork(const WorkNode &w) {
  if (w.kids.empty()) return ParseTree::Leaf(w.label, w.token);
  std::vector<ParseTree> kids;
  for (const auto &k : w.kids) kids.push_back(FromWork(*k));
  return ParseTree::Node(w.label, std::move(kids));
}

inline WorkNode *Resolve(WorkNode *root, const TreeAddress &a) {
  WorkNode *n = root;
  for (std::size_t i : a.path) n = n->kids.at(i).get();
  return n;
}

inline bool IsInside(const WorkNode *node, const WorkNode *ancestor) {
  for (const WorkNode *p = node; p; p = p->parent) {
    if (p == ancestor) return true;
  }
  return false;
}

inline std::size_t IndexInParent(const WorkNode *n) {
  const auto &sibs = n->parent->kids;
  for (std::size_t i = 0; i < sibs.size(); ++i) {
    if (sibs[i].get() == n) return i;
  }
  throw std::logic_error("node not found in parent");
}

inline std::optional<TreeAddress> AddressOf(const WorkNode *root,
                                            const WorkNode *n) {
  TreeAddress a;
  const WorkNode *cur = n;
  while (cur != root) {
    if (!cur->parent) return std::nullopt;
    a.path.push_back(IndexInParent(cur));
    cur = cur->parent;
  }
  std::reverse(a.path.begin(), a.path.end());
  return a;
}

class SurgeryRunner {
 public:
  SurgeryRunner(const ParseTree &tree, const MatchResult &match)
      : root_(ToWork(tree, nullptr)) {
    for (const auto &[name, addr] : match.captures) {
      names_[name] = Resolve(root_.get(), addr);
    }
  }

  void Apply(const SurgeryEdit &edit) {
    std::visit([this](const auto &e) { Do(e); }, edit);
  }

  SurgeryResult Finish() {
    SurgeryResult r{FromWork(*root_), {}};
    for (const auto &[name, node] : names_) {
      if (auto a = AddressOf(root_.get(), node)) r.names.emplace(name, *a);
    }
    return r;
  }

 private:
  [[noreturn]] static void Invalid(const std::string &msg) {
    throw Error(ErrorKind::kInvalidEditTarget, msg);
  }

  WorkNode *Lookup(const std::string &name) {
    auto it = names_.find(name);
    if (it == names_.end()) Invalid("'" + name + "' is not bound");
    if (!AddressOf(root_.get(), it->second)) {
      Invalid("'" + name + "' was removed by an earlier edit");
    }
    return it->second;
  }

  std::unique_ptr<WorkNode> Detach(WorkNode *n) {
    WorkNode *p = n->parent;
    std::size_t i = IndexInParent(n);
    std::unique_ptr<WorkNode> owned = std::move(p->kids[i]);
    p->kids.erase(p->kids.begin() + static_cast<std::ptrdiff_t>(i));
    owned->parent = nullptr;
    return owned;
  }

  // Removes interior nodes left without children.
  void Prune(WorkNode *n) {
    while (n && n->kids.empty() && n->token.empty()) {
      if (n == root_.get()) Invalid("edit would leave an empty tree");
      WorkNode *p = n->parent;
      graveyard_.push_back(Detach(n));
      n = p;
    }
  }

  void Place(std::unique_ptr<WorkNode> node, const EditPosition &pos) {
    WorkNode *anchor = Lookup(pos.anchor);
    if (IsInside(anchor, node.get())) Invalid("cannot move a node into itself");
    switch (pos.kind) {
      case EditPosition::Kind::kLeftSisterOf:
      case EditPosition::Kind::kRightSisterOf: {
        if (!anchor->parent) Invalid("root has no sisters");
        WorkNode *p = anchor->parent;
        std::size_t i = IndexInParent(anchor);
        if (pos.kind == EditPosition::Kind::kRightSisterOf) ++i;
        node->parent = p;
        p->kids.insert(p->kids.begin() + static_cast<std::ptrdiff_t>(i),
                       std::move(node));
        break;
      }
      case EditPosition::Kind::kChildOf: {
        if (anchor->is_leaf()) {
          Invalid("cannot add children to leaf '" + anchor->label + "'");
        }
        auto n = static_cast<std::ptrdiff_t>(anchor->kids.size());
        std::ptrdiff_t i = pos.child_index > 0 ? pos.child_index - 1
                                               : n + 1 + pos.child_index;
        if (i < 0 || i > n) Invalid("child index out of range");
        node->parent = anchor;
        anchor->kids.insert(anchor->kids.begin() + i, std::move(node));
        break;
      }
    }
  }

  void Do(const DeleteEdit &e) {
    WorkNode *n = Lookup(e.target);
    if (n == root_.get()) Invalid("cannot delete the root");
    WorkNode *p = n->parent;
    graveyard_.push_back(Detach(n));
    Prune(p);
  }

  void Do(const ExciseEdit &e) {
    WorkNode *n = Lookup(e.target);
    if (n->is_leaf()) Invalid("cannot excise leaf '" + n->label + "'");
    if (n == root_.get()) {
      if (n->kids.size() != 1) Invalid("excising the root needs one child");
      std::unique_ptr<WorkNode> child = std::move(n->kids[0]);
      n->kids.clear();
      child->parent = nullptr;
      graveyard_.push_back(std::move(root_));
      root_ = std::move(child);
      return;
    }
    WorkNode *p = n->parent;
    std::size_t i = IndexInParent(n);
    std::unique_ptr<WorkNode> owned = Detach(n);
    for (auto &k : owned->kids) {
      k->parent = p;
      p->kids.insert(p->kids.begin() + static_cast<std::ptrdiff_t>(i++),
                     std::move(k));
    }
    owned->kids.clear();
    graveyard_.push_back(std::move(owned));
  }

  void Do(const RelabelEdit &e) { Lookup(e.target)->label = e.label; }

  void Do(const InsertEdit &e) {
    auto node = ToWork(e.subtree, nullptr);
    for (const auto &[name, addr] : e.names) {
      names_[name] = Resolve(node.get(), addr);
    }
    Place(std::move(node), e.where);
  }

  void Do(const MoveEdit &e) {
    WorkNode *n = Lookup(e.target);
    if (n == root_.get()) Invalid("cannot move the root");
    WorkNode *anchor = Lookup(e.where.anchor);
    if (IsInside(anchor, n)) Invalid("cannot move a node into itself");
    WorkNode *old_parent = n->parent;
    auto owned = Detach(n);
    Place(std::move(owned), e.where);
    Prune(old_parent);
  }

  std::unique_ptr<WorkNode> root_;
  std::map<std::string, WorkNode *> names_;
  // Removed nodes stay alive so stale name lookups can be diagnosed.
  std::vector<std::unique_ptr<WorkNode>> graveyard_;
};

}  // namespace internal

// Applies `script` at one specific match.
inline SurgeryResult ApplySurgeryAt(const ParseTree &tree,
                                    const MatchResult &match,
                                    const SurgeryScript &script) {
  internal::SurgeryRunner runner(tree, match);
  for (const auto &edit : script.edits()) runner.Apply(edit);
  return runner.Finish();
}

struct SurgeryOptions {
  // Re-match and re-apply until the pattern no longer matches.
  bool repeat = false;
  std::size_t max_iterations = 1000;
};

inline ParseTree ApplySurgery(const ParseTree &tree, const TreePattern &pattern,
                              const SurgeryScript &script,
                              const SurgeryOptions &opts = {}) {
  auto missing = script.UnresolvedNames(pattern);
  if (!missing.empty()) {
    throw Error(ErrorKind::kInvalidEditTarget,
                "script refers to unknown name '" + missing.front() + "'");
  }
  auto m = FirstMatch(pattern, tree);
  if (!m) {
    throw Error(ErrorKind::kNoMatch,
                "pattern '" + pattern.expression() + "' does not match");
  }
  ParseTree current = ApplySurgeryAt(tree, *m, script).tree;
  if (!opts.repeat) return current;
  for (std::size_t it = 1; it < opts.max_iterations; ++it) {
    m = FirstMatch(pattern, current);
    if (!m) return current;
    current = ApplySurgeryAt(current, *m, script).tree;
  }
  throw Error(ErrorKind::kInvalidEditTarget,
              "repeated surgery did not converge after " +
                  std::to_string(opts.max_iterations) + " iterations");
}

}  // namespace fluentqa

#endif  // FLUENTQA_TREEOPS_HPP_
