// treebank.hpp
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
// Penn-Treebank bracketed constituency trees: reading, writing, traversal.
//
// A tree is a value. Preterminals are represented as leaves that carry both a
// label (the POS tag) and a token, so "(NP (DT the) (NN dog))" is an NP node
// with two leaf children.

#ifndef FLUENTQA_TREEBANK_HPP_
#define FLUENTQA_TREEBANK_HPP_

#include <cctype>
#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fluentqa/error.hpp"

namespace fluentqa {

// Path of child indices from the root. The empty path addresses the root.
struct TreeAddress {
  std::vector<std::size_t> path;

  bool is_root() const { return path.empty(); }
  std::size_t depth() const { return path.size(); }

  TreeAddress child(std::size_t i) const {
    TreeAddress a = *this;
    a.path.push_back(i);
    return a;
  }
  TreeAddress parent() const {
    TreeAddress a = *this;
    if (!a.path.empty()) a.path.pop_back();
    return a;
  }
  // True if this address is a proper ancestor of `other`.
  bool dominates(const TreeAddress &other) const {
    if (path.size() >= other.path.size()) return false;
    for (std::size_t i = 0; i < path.size(); ++i) {
      if (path[i] != other.path[i]) return false;
    }
    return true;
  }

  auto operator<=>(const TreeAddress &) const = default;
  bool operator==(const TreeAddress &) const = default;
};

inline std::string ToString(const TreeAddress &a) {
  std::string s = "[";
  for (std::size_t i = 0; i < a.path.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(a.path[i]);
  }
  return s + "]";
}

struct TaggedToken {
  std::string token;
  std::string tag;
  bool operator==(const TaggedToken &) const = default;
};

inline bool IsValidLabel(std::string_view label) {
  if (label.empty()) return false;
  for (char c : label) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')') {
      return false;
    }
  }
  return true;
}

class ParseTree {
 public:
  static ParseTree Leaf(std::string label, std::string token) {
    CheckLabel(label);
    if (!IsValidLabel(token)) {
      throw std::invalid_argument("invalid leaf token '" + token + "'");
    }
    ParseTree t;
    t.label_ = std::move(label);
    t.token_ = std::move(token);
    return t;
  }

  static ParseTree Node(std::string label, std::vector<ParseTree> children) {
    CheckLabel(label);
    if (children.empty()) {
      throw std::invalid_argument("interior node '" + label +
                                  "' needs at least one child");
    }
    ParseTree t;
    t.label_ = std::move(label);
    t.children_ = std::move(children);
    return t;
  }

  const std::string &label() const { return label_; }
  bool is_leaf() const { return children_.empty(); }
  // Only meaningful for leaves; empty for interior nodes.
  const std::string &token() const { return token_; }
  std::span<const ParseTree> children() const { return children_; }
  const ParseTree &child(std::size_t i) const { return children_.at(i); }
  std::size_t num_children() const { return children_.size(); }

  // Total number of nodes, leaves included.
  std::size_t size() const {
    std::size_t n = 1;
    for (const auto &c : children_) n += c.size();
    return n;
  }

  const ParseTree &at(const TreeAddress &addr) const {
    const ParseTree *node = this;
    for (std::size_t i : addr.path) {
      if (i >= node->children_.size()) {
        throw std::out_of_range("tree address " + ToString(addr) +
                                " out of range");
      }
      node = &node->children_[i];
    }
    return *node;
  }

  bool contains(const TreeAddress &addr) const {
    const ParseTree *node = this;
    for (std::size_t i : addr.path) {
      if (i >= node->children_.size()) return false;
      node = &node->children_[i];
    }
    return true;
  }

  // Returns a copy with the label of the node at `addr` replaced.
  ParseTree WithLabel(const TreeAddress &addr, std::string label) const {
    CheckLabel(label);
    ParseTree copy = *this;
    copy.MutableAt(addr).label_ = std::move(label);
    return copy;
  }

  // Returns a copy with the subtree at `addr` replaced by `replacement`.
  ParseTree WithSubtree(const TreeAddress &addr, ParseTree replacement) const {
    ParseTree copy = *this;
    copy.MutableAt(addr) = std::move(replacement);
    return copy;
  }

  bool operator==(const ParseTree &) const = default;

 private:
  ParseTree() = default;

  static void CheckLabel(const std::string &label) {
    if (!IsValidLabel(label)) {
      throw std::invalid_argument("invalid tree label '" + label + "'");
    }
  }

  ParseTree &MutableAt(const TreeAddress &addr) {
    ParseTree *node = this;
    for (std::size_t i : addr.path) node = &node->children_.at(i);
    return *node;
  }

  std::string label_;
  std::string token_;
  std::vector<ParseTree> children_;
};

// Visits every node in preorder (parent before children, left to right).
inline void Preorder(
    const ParseTree &tree,
    const std::function<void(const ParseTree &, const TreeAddress &)> &visit) {
  TreeAddress addr;
  std::function<void(const ParseTree &)> walk = [&](const ParseTree &node) {
    visit(node, addr);
    for (std::size_t i = 0; i < node.num_children(); ++i) {
      addr.path.push_back(i);
      walk(node.child(i));
      addr.path.pop_back();
    }
  };
  walk(tree);
}

inline std::vector<TaggedToken> Leaves(const ParseTree &tree) {
  std::vector<TaggedToken> out;
  Preorder(tree, [&](const ParseTree &node, const TreeAddress &) {
    if (node.is_leaf()) out.push_back({node.token(), node.label()});
  });
  return out;
}

inline std::vector<std::string> LeafTokens(const ParseTree &tree) {
  std::vector<std::string> out;
  for (auto &l : Leaves(tree)) out.push_back(std::move(l.token));
  return out;
}

// Maps PTB bracket escapes to their surface characters.
inline std::string SurfaceToken(std::string_view token) {
  if (token == "-LRB-") return "(";
  if (token == "-RRB-") return ")";
  if (token == "-LSB-") return "[";
  if (token == "-RSB-") return "]";
  if (token == "-LCB-") return "{";
  if (token == "-RCB-") return "}";
  return std::string(token);
}

inline std::vector<std::string> SurfaceTokens(const ParseTree &tree) {
  std::vector<std::string> out;
  for (const auto &l : Leaves(tree)) out.push_back(SurfaceToken(l.token));
  return out;
}

inline std::string ToPtb(const ParseTree &tree) {
  std::string out;
  std::function<void(const ParseTree &)> emit = [&](const ParseTree &node) {
    out += '(';
    out += node.label();
    if (node.is_leaf()) {
      out += ' ';
      out += node.token();
    } else {
      for (const auto &c : node.children()) {
        out += ' ';
        emit(c);
      }
    }
    out += ')';
  };
  emit(tree);
  return out;
}

// "NP-SBJ-1" -> "NP", "NP=2" -> "NP". Labels that start with '-' such as
// -NONE- or -LRB- are left alone.
inline std::string StripFunctionalTag(const std::string &label) {
  if (label.empty() || label[0] == '-') return label;
  std::size_t cut = label.find_first_of("-=");
  if (cut == std::string::npos || cut == 0) return label;
  return label.substr(0, cut);
}

struct PtbReadOptions {
  bool strip_functional_tags = false;
};

namespace internal {

class PtbReader {
 public:
  PtbReader(std::string_view text, const PtbReadOptions &opts)
      : text_(text), opts_(opts) {}

  ParseTree ReadAll() {
    SkipSpace();
    if (pos_ >= text_.size()) {
      throw Error(ErrorKind::kUnbalancedBrackets, "empty input");
    }
    ParseTree tree = ReadNode();
    SkipSpace();
    if (pos_ != text_.size()) {
      throw Error(ErrorKind::kTrailingContent,
                  "unexpected content at offset " + std::to_string(pos_));
    }
    return tree;
  }

 private:
  void SkipSpace() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  std::string ReadAtom() {
    std::size_t start = pos_;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '(' || c == ')' || std::isspace(static_cast<unsigned char>(c)))
        break;
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  ParseTree ReadNode() {
    SkipSpace();
    if (pos_ >= text_.size() || text_[pos_] != '(') {
      throw Error(ErrorKind::kUnbalancedBrackets,
                  "expected '(' at offset " + std::to_string(pos_));
    }
    ++pos_;
    SkipSpace();
    std::string label = ReadAtom();
    if (label.empty()) {
      if (pos_ >= text_.size()) {
        throw Error(ErrorKind::kUnbalancedBrackets, "input ends inside node");
      }
      throw Error(ErrorKind::kEmptyLabel,
                  "node without label at offset " + std::to_string(pos_));
    }
    if (opts_.strip_functional_tags) label = StripFunctionalTag(label);

    SkipSpace();
    if (pos_ >= text_.size()) {
      throw Error(ErrorKind::kUnbalancedBrackets, "input ends inside '" +
                                                      label + "'");
    }
    if (text_[pos_] == ')') {
      throw Error(ErrorKind::kEmptyLabel,
                  "node '" + label + "' has neither children nor token");
    }
    if (text_[pos_] != '(') {
      std::string token = ReadAtom();
      SkipSpace();
      if (pos_ >= text_.size()) {
        throw Error(ErrorKind::kUnbalancedBrackets,
                    "input ends after token '" + token + "'");
      }
      if (text_[pos_] != ')') {
        throw Error(ErrorKind::kTrailingContent,
                    "leaf '" + label + "' has more than one token");
      }
      ++pos_;
      return ParseTree::Leaf(std::move(label), std::move(token));
    }

    std::vector<ParseTree> children;
    while (true) {
      SkipSpace();
      if (pos_ >= text_.size()) {
        throw Error(ErrorKind::kUnbalancedBrackets,
                    "input ends inside '" + label + "'");
      }
      if (text_[pos_] == ')') {
        ++pos_;
        break;
      }
      if (text_[pos_] != '(') {
        throw Error(ErrorKind::kTrailingContent,
                    "bare token among children of '" + label + "'");
      }
      children.push_back(ReadNode());
    }
    return ParseTree::Node(std::move(label), std::move(children));
  }

  std::string_view text_;
  PtbReadOptions opts_;
  std::size_t pos_ = 0;
};

}  // namespace internal

inline ParseTree ParsePtb(std::string_view text,
                          const PtbReadOptions &opts = {}) {
  return internal::PtbReader(text, opts).ReadAll();
}

// Looks through a single-child ROOT wrapper.
inline const ParseTree &Unwrap(const ParseTree &tree) {
  if (tree.label() == "ROOT" && tree.num_children() == 1) return tree.child(0);
  return tree;
}

inline bool ContainsLabel(const ParseTree &tree, std::string_view label) {
  if (tree.label() == label) return true;
  for (const auto &c : tree.children()) {
    if (ContainsLabel(c, label)) return true;
  }
  return false;
}

}  // namespace fluentqa

#endif  // FLUENTQA_TREEBANK_HPP_
