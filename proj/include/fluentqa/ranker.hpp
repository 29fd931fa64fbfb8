// ranker.hpp
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
// Linear response scorer F = w.x + b over standardized features, trained
// with a per-response logistic loss or a per-group softmax margin loss.
//
// The softmax loss for a unit (one good response p against negatives N) is
//
//   log(1 + sum_{n in N} exp(F_n - F_p))
//
// Training draws units per group by strided negative sampling: negatives are
// shuffled and dealt round-robin into chunks of K-1, each chunk paired with a
// randomly chosen positive. K = 0 instead builds one unit per positive with
// all negatives.

#ifndef FLUENTQA_RANKER_HPP_
#define FLUENTQA_RANKER_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "fluentqa/error.hpp"
#include "fluentqa/features.hpp"
#include "fluentqa/io.hpp"
#include "fluentqa/stgen.hpp"

namespace fluentqa {

enum class LossKind { kLogistic, kSoftmax };

inline std::string_view LossName(LossKind k) {
  return k == LossKind::kLogistic ? "logistic" : "softmax";
}

inline LossKind ParseLossKind(std::string_view name) {
  if (name == "logistic") return LossKind::kLogistic;
  if (name == "softmax") return LossKind::kSoftmax;
  throw Error(ErrorKind::kDataError, "unknown loss '" + std::string(name) + "'");
}

// One question's candidates as feature vectors. Labels may be empty when
// the group is only ranked.
struct FeatureGroup {
  std::string id;
  std::vector<FeatureVector> features;
  std::vector<int> labels;
  std::vector<std::vector<std::string>> tokens;
};

struct TrainOptions {
  double learning_rate = 0.1;
  int epochs = 50;
  double l2 = 1e-4;
  std::size_t batch_groups = 32;
  std::uint64_t seed = 13;
  // Step decay: the rate is multiplied by decay_factor every decay_every
  // epochs.
  int decay_every = 20;
  double decay_factor = 0.5;
  // Responses per softmax unit (1 positive + K-1 negatives); 0 disables
  // sampling.
  std::size_t negatives_per_unit = 50;
};

struct SoftmaxUnit {
  std::size_t group = 0;
  std::size_t positive = 0;
  std::vector<std::size_t> negatives;
};

struct EpochRecord {
  int epoch = 0;
  double loss = 0;
  double learning_rate = 0;
};

struct LossGrad {
  double loss = 0;
  std::vector<double> dw;
  double db = 0;
};

namespace internal {

inline double Dot(const std::vector<double> &w, const std::vector<double> &x) {
  double s = 0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * x[i];
  return s;
}

// log(1 + exp(z)) without overflow.
inline double Softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

inline double Sigmoid(double z) {
  if (z >= 0) return 1 / (1 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1 + e);
}

inline std::size_t UniformIndex(std::mt19937_64 &rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

template <class T>
void Shuffle(std::vector<T> &v, std::mt19937_64 &rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[UniformIndex(rng, i)]);
  }
}

}  // namespace internal

// Sum over examples of log(1 + exp(-y F)) with y = +1 for label 1 and -1 for
// label 0.
inline LossGrad LogisticLossGrad(const std::vector<double> &w, double b,
                                 const std::vector<const FeatureVector *> &xs,
                                 const std::vector<int> &labels) {
  LossGrad g{0, std::vector<double>(w.size(), 0.0), 0};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double y = labels[i] ? 1.0 : -1.0;
    const double f = internal::Dot(w, *xs[i]) + b;
    g.loss += internal::Softplus(-y * f);
    const double d = -y * internal::Sigmoid(-y * f);
    for (std::size_t k = 0; k < w.size(); ++k) g.dw[k] += d * (*xs[i])[k];
    g.db += d;
  }
  return g;
}

// Sum over units of log(1 + sum_n exp(F_n - F_p)).
inline LossGrad SoftmaxLossGrad(
    const std::vector<double> &w, double b,
    const std::vector<std::vector<FeatureVector>> &groups,
    const std::vector<SoftmaxUnit> &units) {
  LossGrad g{0, std::vector<double>(w.size(), 0.0), 0};
  std::vector<double> margins;
  for (const auto &u : units) {
    const auto &xs = groups[u.group];
    const double fp = internal::Dot(w, xs[u.positive]) + b;
    margins.assign(1, 0.0);
    for (std::size_t n : u.negatives) {
      margins.push_back(internal::Dot(w, xs[n]) + b - fp);
    }
    const double top = *std::max_element(margins.begin(), margins.end());
    double z = 0;
    for (double m : margins) z += std::exp(m - top);
    g.loss += top + std::log(z);
    // d/dF_n = softmax weight of n; d/dF_p = -(sum of those weights).
    double total = 0;
    for (std::size_t i = 0; i < u.negatives.size(); ++i) {
      const double p = std::exp(margins[i + 1] - top) / z;
      total += p;
      const auto &x = xs[u.negatives[i]];
      for (std::size_t k = 0; k < w.size(); ++k) g.dw[k] += p * x[k];
    }
    const auto &x = xs[u.positive];
    for (std::size_t k = 0; k < w.size(); ++k) g.dw[k] -= total * x[k];
  }
  return g;
}

// Units for one group: negatives shuffled and dealt round-robin into
// ceil(|neg| / (K-1)) chunks, each with a random positive. K = 0 yields one
// unit per positive holding every negative.
inline std::vector<SoftmaxUnit> StridedUnits(std::size_t group,
                                             const std::vector<int> &labels,
                                             std::size_t k,
                                             std::mt19937_64 &rng) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    (labels[i] ? pos : neg).push_back(i);
  }
  std::vector<SoftmaxUnit> units;
  if (pos.empty() || neg.empty()) return units;
  if (k == 0) {
    for (std::size_t p : pos) units.push_back({group, p, neg});
    return units;
  }
  const std::size_t per = std::max<std::size_t>(k, 2) - 1;
  internal::Shuffle(neg, rng);
  const std::size_t chunks = (neg.size() + per - 1) / per;
  for (std::size_t c = 0; c < chunks; ++c) {
    SoftmaxUnit u{group, pos[internal::UniformIndex(rng, pos.size())], {}};
    for (std::size_t i = c; i < neg.size(); i += chunks) u.negatives.push_back(neg[i]);
    units.push_back(std::move(u));
  }
  return units;
}

// Full softmax objective units: every positive against all negatives.
inline std::vector<SoftmaxUnit> AllUnits(const std::vector<FeatureGroup> &groups) {
  std::vector<SoftmaxUnit> units;
  std::mt19937_64 unused(0);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    auto u = StridedUnits(g, groups[g].labels, 0, unused);
    units.insert(units.end(), u.begin(), u.end());
  }
  return units;
}

struct RankerModel {
  std::string schema = std::string(kFeatureSchemaVersion);
  std::vector<double> weights = std::vector<double>(kNumFeatures, 0.0);
  double bias = 0;
  LossKind loss = LossKind::kLogistic;
  Standardization standardization = Standardization::Fit({});
  TrainOptions hyperparameters;
  std::string training_hash;

  double Score(const FeatureVector &raw) const {
    if (raw.size() != weights.size()) {
      throw Error(ErrorKind::kSchemaMismatch,
                  "feature vector has " + std::to_string(raw.size()) +
                      " dimensions, model expects " +
                      std::to_string(weights.size()));
    }
    return internal::Dot(weights, standardization.Apply(raw)) + bias;
  }

  Json ToJson() const {
    const auto &h = hyperparameters;
    return Json{
        {"schema", FeatureSchemaJson()},
        {"weights", weights},
        {"bias", bias},
        {"loss", LossName(loss)},
        {"standardization",
         {{"mean", standardization.mean}, {"scale", standardization.scale}}},
        {"hyperparameters",
         {{"learning_rate", h.learning_rate},
          {"epochs", h.epochs},
          {"l2", h.l2},
          {"batch_groups", h.batch_groups},
          {"seed", h.seed},
          {"decay_every", h.decay_every},
          {"decay_factor", h.decay_factor},
          {"negatives_per_unit", h.negatives_per_unit}}},
        {"training_hash", training_hash}};
  }

  static RankerModel FromJson(const Json &j) {
    RankerModel m;
    const auto &schema = j.at("schema");
    m.schema = schema.at("version").get<std::string>();
    if (m.schema != kFeatureSchemaVersion ||
        schema.at("names").get<std::vector<std::string>>() != FeatureNames()) {
      throw Error(ErrorKind::kSchemaMismatch,
                  "model was trained on feature schema '" + m.schema + "'");
    }
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    m.loss = ParseLossKind(j.at("loss").get<std::string>());
    m.standardization.mean = j.at("standardization").at("mean").get<std::vector<double>>();
    m.standardization.scale =
        j.at("standardization").at("scale").get<std::vector<double>>();
    if (m.weights.size() != kNumFeatures ||
        m.standardization.mean.size() != kNumFeatures ||
        m.standardization.scale.size() != kNumFeatures) {
      throw Error(ErrorKind::kSchemaMismatch, "model has wrong dimensionality");
    }
    const auto &h = j.at("hyperparameters");
    auto &o = m.hyperparameters;
    o.learning_rate = h.at("learning_rate");
    o.epochs = h.at("epochs");
    o.l2 = h.at("l2");
    o.batch_groups = h.at("batch_groups");
    o.seed = h.at("seed");
    o.decay_every = h.at("decay_every");
    o.decay_factor = h.at("decay_factor");
    o.negatives_per_unit = h.at("negatives_per_unit");
    m.training_hash = j.value("training_hash", "");
    return m;
  }
};

struct TrainResult {
  RankerModel model;
  std::vector<EpochRecord> curve;
};

inline std::string CurveCsv(const std::vector<EpochRecord> &curve) {
  std::string out = "epoch,loss,lr\n";
  char buf[96];
  for (const auto &r : curve) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", r.epoch, r.loss,
                  r.learning_rate);
    out += buf;
  }
  return out;
}

namespace internal {

inline std::string TrainingHash(const std::vector<FeatureGroup> &groups,
                                LossKind loss, const TrainOptions &o) {
  std::uint64_t h = Fnv1a64(LossName(loss));
  char buf[64];
  auto mix = [&](double v) {
    std::snprintf(buf, sizeof buf, "%a;", v);
    h = Fnv1a64(buf, h);
  };
  for (const auto &g : groups) {
    h = Fnv1a64(g.id, h);
    for (std::size_t i = 0; i < g.features.size(); ++i) {
      for (double v : g.features[i]) mix(v);
      mix(g.labels.at(i));
    }
  }
  for (double v : {o.learning_rate, double(o.epochs), o.l2,
                   double(o.batch_groups), double(o.seed),
                   double(o.decay_every), o.decay_factor,
                   double(o.negatives_per_unit)}) {
    mix(v);
  }
  return HexHash(h);
}

}  // namespace internal

// Optional hook observing every softmax unit drawn during training.
using UnitObserver = std::function<void(int epoch, const SoftmaxUnit &)>;

inline TrainResult TrainRanker(const std::vector<FeatureGroup> &groups,
                               LossKind loss, const TrainOptions &opts = {},
                               const UnitObserver &observer = nullptr) {
  if (groups.empty()) throw Error(ErrorKind::kDegenerateData, "no training groups");
  std::vector<FeatureVector> all;
  bool any_pos = false, any_neg = false;
  for (const auto &g : groups) {
    if (g.labels.size() != g.features.size()) {
      throw Error(ErrorKind::kDataError,
                  "group '" + g.id + "' has mismatched labels");
    }
    bool group_pos = false;
    for (std::size_t i = 0; i < g.features.size(); ++i) {
      all.push_back(g.features[i]);
      (g.labels[i] ? any_pos : any_neg) = true;
      group_pos |= g.labels[i] != 0;
    }
    if (loss == LossKind::kSoftmax && !group_pos) {
      throw Error(ErrorKind::kNoPositive,
                  "group '" + g.id + "' has no good response");
    }
  }
  if (loss == LossKind::kLogistic && (!any_pos || !any_neg)) {
    throw Error(ErrorKind::kDegenerateData, "all training labels are equal");
  }

  TrainResult result;
  RankerModel &m = result.model;
  m.loss = loss;
  m.hyperparameters = opts;
  m.standardization = Standardization::Fit(all);
  m.training_hash = internal::TrainingHash(groups, loss, opts);

  std::vector<std::vector<FeatureVector>> z(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (const auto &x : groups[g].features) {
      z[g].push_back(m.standardization.Apply(x));
    }
  }
  std::vector<const FeatureVector *> all_x;
  std::vector<int> all_y;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t i = 0; i < z[g].size(); ++i) {
      all_x.push_back(&z[g][i]);
      all_y.push_back(groups[g].labels[i]);
    }
  }
  const auto full_units = AllUnits(groups);

  auto objective = [&]() {
    double l2 = 0;
    for (double v : m.weights) l2 += v * v;
    l2 *= opts.l2 / 2;
    if (loss == LossKind::kLogistic) {
      return LogisticLossGrad(m.weights, m.bias, all_x, all_y).loss /
                 double(all_x.size()) + l2;
    }
    if (full_units.empty()) return l2;
    return SoftmaxLossGrad(m.weights, m.bias, z, full_units).loss /
               double(full_units.size()) + l2;
  };

  std::mt19937_64 rng(opts.seed);
  std::vector<std::size_t> order(groups.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch = std::max<std::size_t>(opts.batch_groups, 1);

  for (int epoch = 1; epoch <= opts.epochs; ++epoch) {
    const int steps = opts.decay_every > 0 ? (epoch - 1) / opts.decay_every : 0;
    const double lr = opts.learning_rate * std::pow(opts.decay_factor, steps);
    internal::Shuffle(order, rng);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      LossGrad g;
      double n = 0;
      if (loss == LossKind::kLogistic) {
        std::vector<const FeatureVector *> xs;
        std::vector<int> ys;
        for (std::size_t i = start; i < end; ++i) {
          for (std::size_t c = 0; c < z[order[i]].size(); ++c) {
            xs.push_back(&z[order[i]][c]);
            ys.push_back(groups[order[i]].labels[c]);
          }
        }
        g = LogisticLossGrad(m.weights, m.bias, xs, ys);
        n = double(xs.size());
      } else {
        std::vector<SoftmaxUnit> units;
        for (std::size_t i = start; i < end; ++i) {
          auto u = StridedUnits(order[i], groups[order[i]].labels,
                                opts.negatives_per_unit, rng);
          for (const auto &unit : u) {
            if (observer) observer(epoch, unit);
          }
          units.insert(units.end(), u.begin(), u.end());
        }
        g = SoftmaxLossGrad(m.weights, m.bias, z, units);
        n = double(units.size());
      }
      if (n == 0) continue;
      for (std::size_t k = 0; k < m.weights.size(); ++k) {
        m.weights[k] -= lr * (g.dw[k] / n + opts.l2 * m.weights[k]);
      }
      m.bias -= lr * g.db / n;
    }
    result.curve.push_back({epoch, objective(), lr});
  }
  return result;
}

// Candidate order by descending score; ties go to the shorter response, then
// the lexicographically smaller surface string.
inline std::vector<std::size_t> OrderByScore(
    const std::vector<double> &scores,
    const std::vector<std::vector<std::string>> &tokens) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::string> surface;
  for (const auto &t : tokens) surface.push_back(JoinTokens(t));
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    if (tokens.empty()) return false;
    if (tokens[a].size() != tokens[b].size()) {
      return tokens[a].size() < tokens[b].size();
    }
    return surface[a] < surface[b];
  });
  return order;
}

struct RankedGroup {
  std::vector<std::size_t> order;
  std::vector<double> scores;
  // Indexed like the candidates, not like `order`.
  std::vector<double> probabilities;
};

inline std::vector<double> ScoresToProbabilities(const std::vector<double> &scores,
                                                 LossKind loss) {
  std::vector<double> p(scores.size());
  if (scores.empty()) return p;
  if (loss == LossKind::kLogistic) {
    for (std::size_t i = 0; i < scores.size(); ++i) p[i] = internal::Sigmoid(scores[i]);
    return p;
  }
  const double top = *std::max_element(scores.begin(), scores.end());
  double z = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) z += p[i] = std::exp(scores[i] - top);
  for (auto &v : p) v /= z;
  return p;
}

inline RankedGroup RankScores(std::vector<double> scores, LossKind loss,
                              const std::vector<std::vector<std::string>> &tokens) {
  RankedGroup r;
  r.order = OrderByScore(scores, tokens);
  r.probabilities = ScoresToProbabilities(scores, loss);
  r.scores = std::move(scores);
  return r;
}

inline RankedGroup Rank(const RankerModel &model, const FeatureGroup &group) {
  std::vector<double> scores;
  for (const auto &x : group.features) scores.push_back(model.Score(x));
  return RankScores(std::move(scores), model.loss, group.tokens);
}

// Index of the shortest candidate; ties go to the lexicographically smaller
// surface string.
inline std::size_t ShortestResponseBaseline(
    const std::vector<std::vector<std::string>> &candidates) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const auto &a = candidates[i], &b = candidates[best];
    if (a.size() != b.size() ? a.size() < b.size()
                             : JoinTokens(a) < JoinTokens(b)) {
      best = i;
    }
  }
  return best;
}

}  // namespace fluentqa

#endif  // FLUENTQA_RANKER_HPP_
