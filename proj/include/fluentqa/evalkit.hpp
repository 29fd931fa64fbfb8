// evalkit.hpp
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
// Ranking metrics and annotator agreement.
//
// Max-F1 and PR-AUC pool all candidates of all groups by default. A
// candidate is predicted good at threshold t iff its score is >= t, and t
// runs over the distinct scores in descending order.

#ifndef FLUENTQA_EVALKIT_HPP_
#define FLUENTQA_EVALKIT_HPP_

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "fluentqa/error.hpp"
#include "fluentqa/morphology.hpp"
#include "fluentqa/ranker.hpp"

namespace fluentqa {

struct ScoredGroup {
  std::string id;
  std::vector<double> scores;
  std::vector<int> labels;
  // Optional; used only to break score ties.
  std::vector<std::vector<std::string>> tokens;
};

// Fraction of groups whose top-ranked candidate is labeled good. Empty
// groups count as misses.
inline double PrecisionAtOne(const std::vector<ScoredGroup> &groups) {
  if (groups.empty()) return 0;
  std::size_t hits = 0;
  for (const auto &g : groups) {
    if (g.scores.empty()) continue;
    auto order = OrderByScore(g.scores, g.tokens);
    if (g.labels.at(order[0])) ++hits;
  }
  return double(hits) / double(groups.size());
}

struct MaxF1Result {
  double value = 0;
  double threshold = 0;
  double precision = 0;
  double recall = 0;
};

namespace internal {

// (score, label) pairs sorted by descending score.
inline std::vector<std::pair<double, int>> Pool(
    const std::vector<ScoredGroup> &groups) {
  std::vector<std::pair<double, int>> all;
  for (const auto &g : groups) {
    for (std::size_t i = 0; i < g.scores.size(); ++i) {
      all.emplace_back(g.scores[i], g.labels.at(i) ? 1 : 0);
    }
  }
  std::sort(all.begin(), all.end(),
            [](const auto &a, const auto &b) { return a.first > b.first; });
  return all;
}

struct ThresholdPoint {
  double threshold;
  double tp;
  double fp;
};

// Cumulative counts at each distinct threshold, descending.
inline std::vector<ThresholdPoint> Sweep(
    const std::vector<std::pair<double, int>> &sorted) {
  std::vector<ThresholdPoint> pts;
  double tp = 0, fp = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    (sorted[i].second ? tp : fp) += 1;
    if (i + 1 == sorted.size() || sorted[i + 1].first != sorted[i].first) {
      pts.push_back({sorted[i].first, tp, fp});
    }
  }
  return pts;
}

inline MaxF1Result MaxF1Pooled(const std::vector<ScoredGroup> &groups) {
  auto sorted = Pool(groups);
  double positives = 0;
  for (const auto &p : sorted) positives += p.second;
  if (positives == 0) throw Error(ErrorKind::kNoPositives, "no good candidates");
  MaxF1Result best;
  bool first = true;
  for (const auto &pt : Sweep(sorted)) {
    const double precision = pt.tp / (pt.tp + pt.fp);
    const double recall = pt.tp / positives;
    const double f1 =
        pt.tp > 0 ? 2 * precision * recall / (precision + recall) : 0;
    if (first || f1 > best.value) {
      best = {f1, pt.threshold, precision, recall};
      first = false;
    }
  }
  return best;
}

inline double PrAucPooled(const std::vector<ScoredGroup> &groups) {
  auto sorted = Pool(groups);
  double positives = 0;
  for (const auto &p : sorted) positives += p.second;
  if (positives == 0) throw Error(ErrorKind::kNoPositives, "no good candidates");
  double ap = 0, prev_recall = 0;
  for (const auto &pt : Sweep(sorted)) {
    const double recall = pt.tp / positives;
    ap += (recall - prev_recall) * (pt.tp / (pt.tp + pt.fp));
    prev_recall = recall;
  }
  return ap;
}

inline bool HasPositive(const ScoredGroup &g) {
  return std::any_of(g.labels.begin(), g.labels.end(), [](int l) { return l != 0; });
}

}  // namespace internal

// With `macro`, the metric is averaged over groups that have a good
// candidate; the returned threshold/precision/recall are then averages too.
inline MaxF1Result MaxF1(const std::vector<ScoredGroup> &groups,
                         bool macro = false) {
  if (!macro) return internal::MaxF1Pooled(groups);
  MaxF1Result avg;
  double n = 0;
  for (const auto &g : groups) {
    if (!internal::HasPositive(g)) continue;
    auto r = internal::MaxF1Pooled({g});
    avg.value += r.value;
    avg.threshold += r.threshold;
    avg.precision += r.precision;
    avg.recall += r.recall;
    n += 1;
  }
  if (n == 0) throw Error(ErrorKind::kNoPositives, "no good candidates");
  avg.value /= n;
  avg.threshold /= n;
  avg.precision /= n;
  avg.recall /= n;
  return avg;
}

inline double PrAuc(const std::vector<ScoredGroup> &groups, bool macro = false) {
  if (!macro) return internal::PrAucPooled(groups);
  double sum = 0, n = 0;
  for (const auto &g : groups) {
    if (!internal::HasPositive(g)) continue;
    sum += internal::PrAucPooled({g});
    n += 1;
  }
  if (n == 0) throw Error(ErrorKind::kNoPositives, "no good candidates");
  return sum / n;
}

inline nlohmann::json MetricsReport(const std::vector<ScoredGroup> &groups,
                                    bool macro = false) {
  std::size_t candidates = 0;
  for (const auto &g : groups) candidates += g.scores.size();
  auto f1 = MaxF1(groups, macro);
  return {{"p_at_1", PrecisionAtOne(groups)},
          {"max_f1",
           {{"value", f1.value},
            {"threshold", f1.threshold},
            {"precision", f1.precision},
            {"recall", f1.recall}}},
          {"pr_auc", PrAuc(groups, macro)},
          {"n_questions", groups.size()},
          {"n_candidates", candidates}};
}

// ---------------------------------------------------------------------------
// Annotator agreement

struct AnnotationRecord {
  std::string question_id;
  std::string annotator_id;
  std::string response;
};

// Lowercases and collapses whitespace runs.
inline std::string NormalizeResponse(const std::string &text) {
  std::string out;
  bool space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

// Each annotation is a match when at least two distinct annotators chose
// the same (normalized) response for the question. An annotator's agreement
// is their match rate; the result averages those rates weighted by how many
// questions each annotator annotated.
inline double AnnotatorAgreement(const std::vector<AnnotationRecord> &records) {
  std::map<std::pair<std::string, std::string>, std::set<std::string>> pickers;
  for (const auto &r : records) {
    pickers[{r.question_id, NormalizeResponse(r.response)}].insert(r.annotator_id);
  }
  std::map<std::string, std::pair<double, double>> per;  // matches, total
  for (const auto &r : records) {
    auto &p = per[r.annotator_id];
    p.second += 1;
    if (pickers[{r.question_id, NormalizeResponse(r.response)}].size() >= 2) {
      p.first += 1;
    }
  }
  std::map<std::string, std::set<std::string>> questions;
  for (const auto &r : records) questions[r.annotator_id].insert(r.question_id);

  double num = 0, den = 0;
  for (const auto &[annotator, counts] : per) {
    const double weight = double(questions[annotator].size());
    num += weight * counts.first / counts.second;
    den += weight;
  }
  return den > 0 ? num / den : 0;
}

}  // namespace fluentqa

#endif  // FLUENTQA_EVALKIT_HPP_
