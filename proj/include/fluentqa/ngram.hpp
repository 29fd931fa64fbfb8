// ngram.hpp
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
// Interpolated modified Kneser-Ney n-gram language model with ARPA I/O.
//
// The trained model is kept in backoff form: every stored n-gram holds its
// fully interpolated log10 probability, and every context holds the log10
// weight given to the next-lower order. Lookups therefore behave the same for
// trained and ARPA-loaded models.

#ifndef FLUENTQA_NGRAM_HPP_
#define FLUENTQA_NGRAM_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fluentqa/error.hpp"
#include "fluentqa/morphology.hpp"

namespace fluentqa {

inline constexpr std::string_view kSentenceStart = "<s>";
inline constexpr std::string_view kSentenceEnd = "</s>";
inline constexpr std::string_view kUnknown = "<unk>";

// log10 value standing in for probability zero, as in ARPA files.
inline constexpr double kLogZero = -99.0;

struct NGramOptions {
  int order = 3;
  // Overrides the count-of-counts estimate of D1, D2, D3+ with one value.
  std::optional<double> fixed_discount;
  // Pad each training sentence with (order - 1) <s> and one </s>.
  bool pad_sentences = true;
  // Mass reserved for <unk> in the lowest order, in units of one count.
  double unk_pseudo_count = 1.0;
  bool lowercase = true;
};

struct SequenceScore {
  double log_prob = 0;             // natural log
  double normalized_log_prob = 0;  // log_prob / (tokens + 1)
  double perplexity = 1;
};

class NGramModel {
 public:
  using Corpus = std::vector<std::vector<std::string>>;

  static NGramModel Train(const Corpus &corpus, const NGramOptions &opts = {});
  static NGramModel FromArpa(std::istream &in);
  void WriteArpa(std::ostream &out) const;

  int order() const { return static_cast<int>(tables_.size()); }
  bool lowercase() const { return lowercase_; }
  // Every unigram in the model, markers included.
  std::vector<std::string> vocabulary() const {
    std::vector<std::string> v;
    for (const auto &[k, e] : tables_[0]) v.push_back(k);
    return v;
  }
  bool InVocabulary(const std::string &w) const {
    return tables_[0].count(w) > 0;
  }
  std::size_t num_ngrams(int n) const { return tables_.at(n - 1).size(); }
  const std::array<double, 3> &discounts(int n) const {
    return discounts_.at(n - 1);
  }

  // p(word | context); only the last order-1 context words are used. Words
  // are taken as given (no lowercasing); unknown words map to <unk>.
  double Prob(const std::vector<std::string> &context,
              const std::string &word) const {
    return std::pow(10.0, Log10Prob(context, word));
  }
  double Log10Prob(const std::vector<std::string> &context,
                   const std::string &word) const;

  SequenceScore Score(const std::vector<std::string> &tokens) const;

 private:
  struct Entry {
    double log_prob = kLogZero;
    std::optional<double> log_bow;
  };
  using Table = std::map<std::string, Entry>;

  static std::string Key(const std::vector<std::string> &words,
                         std::size_t begin, std::size_t end) {
    std::string k;
    for (std::size_t i = begin; i < end; ++i) {
      if (i > begin) k += ' ';
      k += words[i];
    }
    return k;
  }

  std::string Normalize(const std::string &w) const {
    std::string t = lowercase_ ? ToLower(w) : w;
    return InVocabulary(t) ? t : std::string(kUnknown);
  }

  std::vector<Table> tables_;
  std::vector<std::array<double, 3>> discounts_;
  bool lowercase_ = true;
};

namespace internal {

inline double Log10OrZero(double p) {
  return p > 0 ? std::max(std::log10(p), kLogZero) : kLogZero;
}

inline std::vector<std::string> SplitKey(const std::string &key) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t sp = key.find(' ', start);
    out.push_back(key.substr(start, sp - start));
    if (sp == std::string::npos) break;
    start = sp + 1;
  }
  return out;
}

// Modified KN discounts from count-of-counts n1..n4, clamped to 0 < D_c <= c.
// An estimate that the counts cannot support keeps its default.
inline std::array<double, 3> EstimateDiscounts(
    const std::array<double, 4> &n) {
  std::array<double, 3> d{0.5, 1.0, 1.5};
  if (n[0] <= 0 || n[1] <= 0) return d;
  const double y = n[0] / (n[0] + 2 * n[1]);
  for (int k = 0; k < 3; ++k) {
    if (n[k] <= 0 || n[k + 1] <= 0) continue;
    double est = (k + 1) - (k + 2) * y * n[k + 1] / n[k];
    if (std::isfinite(est) && est > 0) d[k] = std::min(est, double(k + 1));
  }
  return d;
}

}  // namespace internal

inline double NGramModel::Log10Prob(const std::vector<std::string> &context,
                                    const std::string &word) const {
  const std::size_t n = tables_.size();
  std::size_t start = context.size() > n - 1 ? context.size() - (n - 1) : 0;
  std::vector<std::string> gram(context.begin() + start, context.end());
  gram.push_back(InVocabulary(word) ? word : std::string(kUnknown));

  double bow = 0;
  for (std::size_t from = 0; from < gram.size(); ++from) {
    const std::size_t len = gram.size() - from;
    const Table &table = tables_[len - 1];
    auto it = table.find(Key(gram, from, gram.size()));
    if (it != table.end()) return std::max(bow + it->second.log_prob, kLogZero);
    if (len > 1) {
      auto ctx = tables_[len - 2].find(Key(gram, from, gram.size() - 1));
      if (ctx != tables_[len - 2].end() && ctx->second.log_bow) {
        bow += *ctx->second.log_bow;
      }
    }
  }
  return kLogZero;
}

inline SequenceScore NGramModel::Score(
    const std::vector<std::string> &tokens) const {
  std::vector<std::string> seq(tables_.size() - 1, std::string(kSentenceStart));
  for (const auto &t : tokens) seq.push_back(Normalize(t));
  seq.emplace_back(kSentenceEnd);

  SequenceScore s;
  const double ln10 = std::log(10.0);
  for (std::size_t i = tables_.size() - 1; i < seq.size(); ++i) {
    std::vector<std::string> ctx(seq.begin() + (i - (tables_.size() - 1)),
                                 seq.begin() + i);
    s.log_prob += Log10Prob(ctx, seq[i]) * ln10;
  }
  s.normalized_log_prob = s.log_prob / double(tokens.size() + 1);
  s.perplexity = std::exp(-s.normalized_log_prob);
  return s;
}

inline NGramModel NGramModel::Train(const Corpus &corpus,
                                    const NGramOptions &opts) {
  if (opts.order < 1) {
    throw Error(ErrorKind::kDataError, "n-gram order must be at least 1");
  }
  const std::size_t order = static_cast<std::size_t>(opts.order);
  std::vector<std::vector<std::string>> sentences;
  std::set<std::string> words;
  for (const auto &raw : corpus) {
    if (raw.empty()) continue;
    std::vector<std::string> s;
    if (opts.pad_sentences) {
      s.assign(order - 1, std::string(kSentenceStart));
    }
    for (const auto &w : raw) s.push_back(opts.lowercase ? ToLower(w) : w);
    if (opts.pad_sentences) s.emplace_back(kSentenceEnd);
    words.insert(s.begin(), s.end());
    sentences.push_back(std::move(s));
  }
  if (sentences.empty()) {
    throw Error(ErrorKind::kEmptyCorpus, "training corpus has no tokens");
  }
  words.emplace(kUnknown);

  // counts[n-1]: raw counts for the highest order, continuation counts
  // (distinct left extensions) below it.
  std::vector<std::map<std::string, double>> counts(order);
  for (const auto &s : sentences) {
    for (std::size_t i = 0; i + order <= s.size(); ++i) {
      counts[order - 1][Key(s, i, i + order)] += 1;
    }
  }
  for (std::size_t n = order - 1; n >= 1; --n) {
    for (const auto &[key, c] : counts[n]) {
      counts[n - 1][key.substr(key.find(' ') + 1)] += 1;
    }
  }

  NGramModel m;
  m.lowercase_ = opts.lowercase;
  m.tables_.resize(order);
  m.discounts_.assign(order, {0, 0, 0});

  // Lowest order: undiscounted distribution plus the <unk> floor.
  {
    double total = opts.unk_pseudo_count;
    for (const auto &[w, c] : counts[0]) total += c;
    if (total <= 0) {
      throw Error(ErrorKind::kEmptyCorpus, "training corpus has no n-grams");
    }
    for (const auto &w : words) {
      double c = w == kUnknown ? opts.unk_pseudo_count : 0;
      if (auto it = counts[0].find(w); it != counts[0].end()) c += it->second;
      m.tables_[0][w].log_prob = internal::Log10OrZero(c / total);
    }
  }

  for (std::size_t n = 2; n <= order; ++n) {
    const auto &cnt = counts[n - 1];
    std::array<double, 3> d;
    if (opts.fixed_discount) {
      d.fill(*opts.fixed_discount);
    } else {
      std::array<double, 4> coc{0, 0, 0, 0};
      for (const auto &[k, c] : cnt) {
        if (c >= 1 && c <= 4) coc[static_cast<int>(c) - 1] += 1;
      }
      d = internal::EstimateDiscounts(coc);
    }
    m.discounts_[n - 1] = d;
    auto discount = [&](double c) {
      return std::min(c, c >= 3 ? d[2] : c >= 2 ? d[1] : d[0]);
    };

    // Per context: total count and total discounted mass.
    std::map<std::string, std::pair<double, double>> ctx;
    for (const auto &[k, c] : cnt) {
      auto &t = ctx[k.substr(0, k.rfind(' '))];
      t.first += c;
      t.second += discount(c);
    }
    for (const auto &[h, t] : ctx) {
      // Contexts that never occur as lower-order n-grams themselves (runs of
      // <s>) still need an entry to carry the backoff weight.
      if (n > 2 && !m.tables_[n - 2].count(h)) {
        auto hw = internal::SplitKey(h);
        std::string last = hw.back();
        hw.pop_back();
        double lp = m.Log10Prob(hw, last);
        m.tables_[n - 2][h].log_prob = lp;
      }
      m.tables_[n - 2][h].log_bow =
          internal::Log10OrZero(t.second / t.first);
    }
    for (const auto &[k, c] : cnt) {
      auto gram = internal::SplitKey(k);
      const auto &t = ctx.at(k.substr(0, k.rfind(' ')));
      std::string w = gram.back();
      gram.pop_back();
      gram.erase(gram.begin());
      double lower = std::pow(10.0, m.Log10Prob(gram, w));
      double p = (c - discount(c)) / t.first + (t.second / t.first) * lower;
      m.tables_[n - 1][k].log_prob = internal::Log10OrZero(p);
    }
  }
  return m;
}

inline void NGramModel::WriteArpa(std::ostream &out) const {
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "# lowercase=" << (lowercase_ ? 1 : 0) << "\n\n\\data\\\n";
  for (std::size_t n = 0; n < tables_.size(); ++n) {
    out << "ngram " << n + 1 << "=" << tables_[n].size() << "\n";
  }
  for (std::size_t n = 0; n < tables_.size(); ++n) {
    out << "\n\\" << n + 1 << "-grams:\n";
    for (const auto &[k, e] : tables_[n]) {
      out << num(e.log_prob) << '\t' << k;
      if (e.log_bow) out << '\t' << num(*e.log_bow);
      out << '\n';
    }
  }
  out << "\n\\end\\\n";
}

inline NGramModel NGramModel::FromArpa(std::istream &in) {
  NGramModel m;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string &why) {
    throw Error(ErrorKind::kMalformedArpa, why, lineno);
  };
  auto next = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  };

  bool found_data = false;
  while (next()) {
    if (line == "# lowercase=0") m.lowercase_ = false;
    if (line == "\\data\\") {
      found_data = true;
      break;
    }
  }
  if (!found_data) fail("missing \\data\\ section");

  std::vector<std::size_t> declared;
  while (next() && line.rfind("ngram ", 0) == 0) {
    auto eq = line.find('=');
    if (eq == std::string::npos) fail("bad ngram count line");
    std::size_t n = 0, c = 0;
    try {
      n = std::stoul(line.substr(6, eq - 6));
      c = std::stoul(line.substr(eq + 1));
    } catch (const std::logic_error &) {
      fail("bad ngram count line");
    }
    if (n != declared.size() + 1) fail("ngram orders out of sequence");
    declared.push_back(c);
  }
  if (declared.empty()) fail("no ngram counts");
  m.tables_.resize(declared.size());
  m.discounts_.assign(declared.size(), {0, 0, 0});

  bool ended = false;
  for (std::size_t n = 1; n <= declared.size(); ++n) {
    if (line != "\\" + std::to_string(n) + "-grams:") {
      fail("expected \\" + std::to_string(n) + "-grams:");
    }
    while (next()) {
      if (line[0] == '\\') break;
      std::vector<std::string> fields;
      std::istringstream ss(line);
      std::string f;
      while (ss >> f) fields.push_back(f);
      if (fields.size() != n + 1 && fields.size() != n + 2) {
        fail("wrong field count in " + std::to_string(n) + "-gram entry");
      }
      Entry e;
      try {
        e.log_prob = std::stod(fields[0]);
        if (fields.size() == n + 2) e.log_bow = std::stod(fields.back());
      } catch (const std::logic_error &) {
        fail("bad number");
      }
      std::vector<std::string> gram(fields.begin() + 1, fields.begin() + 1 + n);
      m.tables_[n - 1][Key(gram, 0, n)] = e;
    }
    if (m.tables_[n - 1].size() != declared[n - 1]) {
      fail("entry count for order " + std::to_string(n) +
           " does not match \\data\\");
    }
  }
  if (line == "\\end\\") ended = true;
  if (!ended) fail("missing \\end\\");
  if (!m.tables_[0].count(std::string(kUnknown))) {
    m.tables_[0][std::string(kUnknown)].log_prob = kLogZero;
  }
  return m;
}

// Index of the highest score; ties go to the shorter candidate, then the
// lexicographically smaller one.
inline std::size_t BestByScore(
    const std::vector<double> &scores,
    const std::vector<std::vector<std::string>> &candidates) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (scores[i] != scores[best]) {
      if (scores[i] > scores[best]) best = i;
    } else if (candidates[i].size() != candidates[best].size()) {
      if (candidates[i].size() < candidates[best].size()) best = i;
    } else if (candidates[i] < candidates[best]) {
      best = i;
    }
  }
  return best;
}

// Candidate with the highest normalized log-probability.
inline std::size_t LmBaselineRank(
    const NGramModel &model,
    const std::vector<std::vector<std::string>> &candidates) {
  std::vector<double> scores;
  for (const auto &c : candidates) {
    scores.push_back(model.Score(c).normalized_log_prob);
  }
  return BestByScore(scores, candidates);
}

}  // namespace fluentqa

#endif  // FLUENTQA_NGRAM_HPP_
