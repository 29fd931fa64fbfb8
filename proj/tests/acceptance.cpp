// acceptance.cpp
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

// Prints one PASS/FAIL line per acceptance criterion and exits nonzero if
// any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fluentqa/fluentqa.hpp"
#include "test_support.hpp"

namespace fluentqa {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// ---------------------------------------------------------------------------

const char kRiseUpTree[] =
    "(ROOT (SBARQ (WHNP (WDT what) (NN year)) (SQ (VBD did) (NP (DT the) (NNP Netherlands)) "
    "(VP (VB rise) (PRT (RP up)) (PP (IN against) (NP (NNP Philip) (NNP II))))) (. ?)))";

Outcome RiseUpExample() {
  const auto start = Clock::now();
  ParseTree tree = ParsePtb(kRiseUpTree);
  QAInstance inst{"riseup", LeafTokens(tree), tree, {"1568"}, std::nullopt};
  auto gen = Generate(inst, RuleSet::Bundled());
  const double secs = Seconds(start);
  std::set<std::string> seen;
  for (const auto &c : gen.candidates) seen.insert(ToLower(JoinTokens(c.tokens)));
  bool both = true;
  for (const char *want : {"the netherlands rose up against philip ii in 1568",
                           "they rose up against philip ii in 1568"}) {
    both &= seen.count(want) > 0;
  }
  return {both && secs < 1.0, std::to_string(gen.candidates.size()) + " candidates, both " +
                                  (both ? "present" : "MISSING") + ", " + Fmt(secs) + " s"};
}

Outcome Fallback() {
  std::mt19937 rng(41);
  const std::vector<std::string> labels = {"S", "NP", "VP", "PP", "WHNP", "WP", "NN",
                                           "VB", "DT", "FRAG", "SINV", "."};
  const std::vector<std::string> tokens = {"who", "what", "did", "the", "dog", "run", "?"};
  int inputs = 0, ok = 0;
  for (int i = 0; i < 1000; ++i) {
    ParseTree tree = testing::RandomTree(rng, labels, tokens, 20);
    if (ContainsLabel(tree, "SBARQ") || ContainsLabel(tree, "SQ")) continue;
    std::vector<std::string> answer;
    for (int k = 0, n = 1 + static_cast<int>(rng() % 3); k < n; ++k) {
      answer.push_back(tokens[rng() % tokens.size()]);
    }
    QAInstance inst{"r" + std::to_string(i), LeafTokens(tree), tree, answer, std::nullopt};
    auto gen = Generate(inst, RuleSet::Bundled());
    ++inputs;
    ok += gen.candidates.size() == 1 && gen.candidates[0].tokens == answer && gen.fallback;
  }
  return {inputs > 0 && ok == inputs,
          std::to_string(ok) + "/" + std::to_string(inputs) + " single bare-answer candidates"};
}

// ---------------------------------------------------------------------------
// End-to-end runs through the command-line tool.

class Pipeline {
 public:
  Pipeline() : dir_(fs::temp_directory_path() / "fluentqa_acceptance") {
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Pipeline() { fs::remove_all(dir_); }

  std::string Path(const std::string &name) const { return (dir_ / name).string(); }

  static std::string Data(const std::string &rel) {
    return std::string(FLUENTQA_SOURCE_DIR) + "/data/" + rel;
  }

  int Run(const std::string &args) const {
    const std::string cmd = std::string(FLUENTQA_CLI) + " " + args + " >>" +
                            Path("log.txt") + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  void Require(const std::string &args, std::vector<std::string> &errors) const {
    if (const int rc = Run(args); rc != 0) {
      errors.push_back("exit " + std::to_string(rc) + ": " + args);
    }
  }

  std::string lms() const {
    return " --lm2 " + Path("lm2.arpa") + " --lm3 " + Path("lm3.arpa");
  }

 private:
  fs::path dir_;
};

Outcome BaselineOrdering(const Pipeline &p) {
  const auto start = Clock::now();
  std::vector<std::string> errors;
  p.Require("build-sg --instances " + p.Data("fixtures/mini_sg/instances.jsonl") +
                " --annotations " + p.Data("fixtures/mini_sg/annotations.jsonl") +
                " --output-dir " + p.Path("sg"),
            errors);
  for (const char *n : {"2", "3"}) {
    p.Require(std::string("train-lm --order ") + n + " --input " + p.Data("lm_corpus.txt") +
                  " --output " + p.Path(std::string("lm") + n + ".arpa"),
              errors);
  }
  for (const char *loss : {"softmax", "logistic"}) {
    const std::string model = p.Path(std::string("model_") + loss + ".json");
    p.Require("train-ranker --loss " + std::string(loss) + " --train " +
                  p.Path("sg/train.jsonl") + p.lms() + " --output " + model,
              errors);
    p.Require("rank --scorer model --model " + model + p.lms() + " --input " +
                  p.Path("sg/test.jsonl") + " --output " + p.Path(std::string(loss) + ".jsonl"),
              errors);
  }
  for (const char *s : {"shortest", "lm"}) {
    p.Require(std::string("rank --scorer ") + s + p.lms() + " --input " +
                  p.Path("sg/test.jsonl") + " --output " + p.Path(std::string(s) + ".jsonl"),
              errors);
  }
  std::map<std::string, Json> metrics;
  for (const char *s : {"softmax", "logistic", "shortest", "lm"}) {
    const std::string out = p.Path(std::string(s) + ".metrics.json");
    p.Require("eval --input " + p.Path(std::string(s) + ".jsonl") + " --gold " +
                  p.Path("sg/test.jsonl") + " --output " + out,
              errors);
    if (errors.empty()) metrics[s] = Json::parse(ReadFile(out));
  }
  const double secs = Seconds(start);
  if (!errors.empty()) return {false, errors.front()};
  auto p1 = [&](const char *s) { return metrics[s]["p_at_1"].get<double>(); };
  auto f1 = [&](const char *s) { return metrics[s]["max_f1"]["value"].get<double>(); };
  const bool order = p1("softmax") > p1("shortest") && p1("shortest") > p1("lm");
  const bool f1_order = f1("softmax") > f1("logistic");
  return {order && f1_order && secs < 120,
          "P@1 softmax " + Fmt(p1("softmax")) + " > shortest " + Fmt(p1("shortest")) +
              " > lm " + Fmt(p1("lm")) + "; Max-F1 softmax " + Fmt(f1("softmax")) +
              " > logistic " + Fmt(f1("logistic")) + "; " +
              std::to_string(metrics["softmax"]["n_questions"].get<int>()) +
              " test questions, " + Fmt(secs) + " s"};
}

Outcome AugmentContract(const Pipeline &p) {
  std::vector<std::string> errors;
  const std::string in = p.Data("fixtures/mini_sg/instances.jsonl");
  for (const char *run : {"a", "b"}) {
    const std::string model = p.Path(std::string("aug_model_") + run + ".json");
    p.Require("--seed 7 train-ranker --train " + p.Path("sg/train.jsonl") + p.lms() +
                  " --output " + model,
              errors);
    const int rc = p.Run("--seed 7 augment --input " + in + " --model " + model + p.lms() +
                         " --output " + p.Path(std::string("aug_") + run + ".jsonl"));
    if (rc != 0 && rc != 3) errors.push_back("augment exit " + std::to_string(rc));
  }
  if (!errors.empty()) return {false, errors.front()};
  const std::string a = ReadFile(p.Path("aug_a.jsonl"));
  const bool identical = a == ReadFile(p.Path("aug_b.jsonl")) &&
                         ReadFile(p.Path("aug_a.jsonl.report.json")) ==
                             ReadFile(p.Path("aug_b.jsonl.report.json"));
  std::istringstream s(a);
  std::map<std::string, std::vector<double>> per;
  std::size_t records = 0;
  for (const auto &r : ReadJsonl(s)) {
    ++records;
    per[r["id"].get<std::string>()].push_back(
        r.contains("probability") ? r["probability"].get<double>() : 1.0);
  }
  bool contract = true;
  for (const auto &[id, probs] : per) {
    contract &= probs.size() <= 3;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      contract &= probs[i] >= 0.5;
      if (i > 0) contract &= probs[i] <= probs[i - 1];
    }
  }
  return {identical && contract && records > 0,
          std::to_string(records) + " responses for " + std::to_string(per.size()) +
              " questions, contract " + (contract ? "holds" : "BROKEN") + ", runs " +
              (identical ? "byte-identical" : "DIFFER")};
}

// ---------------------------------------------------------------------------

FeatureVector RandomVector(std::mt19937 &rng, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  FeatureVector v(kNumFeatures);
  for (auto &x : v) x = g(rng);
  return v;
}

// Random groups with 2..12 candidates and at least one positive.
std::vector<FeatureGroup> RandomGroups(std::mt19937 &rng, int groups) {
  std::vector<FeatureGroup> out;
  for (int g = 0; g < groups; ++g) {
    FeatureGroup fg{"g" + std::to_string(g), {}, {}, {}};
    const int size = 2 + static_cast<int>(rng() % 11);
    for (int c = 0; c < size; ++c) {
      fg.features.push_back(RandomVector(rng, 1.0));
      fg.labels.push_back(rng() % 3 == 0);
      fg.tokens.push_back(std::vector<std::string>(1 + c, "w"));
    }
    fg.labels[rng() % size] = 1;
    if (std::count(fg.labels.begin(), fg.labels.end(), 1) == size) fg.labels[0] = 0;
    out.push_back(fg);
  }
  return out;
}

Outcome LossSanity() {
  std::mt19937 rng(97);
  std::mt19937_64 rng64(97);
  const std::vector<double> zero(kNumFeatures, 0.0);
  double worst_loss = 0, worst_grad = 0;
  for (int batch = 0; batch < 50; ++batch) {
    auto groups = RandomGroups(rng, 1 + static_cast<int>(rng() % 6));
    std::vector<const FeatureVector *> xs;
    std::vector<int> ys;
    std::vector<std::vector<FeatureVector>> feats;
    std::vector<SoftmaxUnit> units;
    const std::size_t k = batch % 2 ? 0 : 2 + rng() % 4;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      for (std::size_t c = 0; c < groups[g].features.size(); ++c) {
        xs.push_back(&groups[g].features[c]);
        ys.push_back(groups[g].labels[c]);
      }
      feats.push_back(groups[g].features);
      auto u = StridedUnits(g, groups[g].labels, k, rng64);
      units.insert(units.end(), u.begin(), u.end());
    }
    double expect_softmax = 0;
    for (const auto &u : units) expect_softmax += std::log(1.0 + u.negatives.size());
    worst_loss = std::max(
        {worst_loss,
         std::abs(LogisticLossGrad(zero, 0, xs, ys).loss - xs.size() * std::log(2.0)),
         std::abs(SoftmaxLossGrad(zero, 0, feats, units).loss - expect_softmax)});

    auto w = RandomVector(rng, 0.2);
    const double b = 0.1;
    const double h = 1e-5;
    auto check = [&](const auto &loss_at, const LossGrad &g) {
      for (std::size_t d = 0; d <= w.size(); ++d) {
        auto wp = w, wm = w;
        double bp = b, bm = b;
        if (d == w.size()) {
          bp += h;
          bm -= h;
        } else {
          wp[d] += h;
          wm[d] -= h;
        }
        const double fd = (loss_at(wp, bp) - loss_at(wm, bm)) / (2 * h);
        const double an = d == w.size() ? g.db : g.dw[d];
        const double rel = std::abs(an - fd) / std::max({std::abs(an), std::abs(fd), 1e-4});
        worst_grad = std::max(worst_grad, rel);
      }
    };
    check([&](const std::vector<double> &ww,
              double bb) { return LogisticLossGrad(ww, bb, xs, ys).loss; },
          LogisticLossGrad(w, b, xs, ys));
    check([&](const std::vector<double> &ww,
              double bb) { return SoftmaxLossGrad(ww, bb, feats, units).loss; },
          SoftmaxLossGrad(w, b, feats, units));
  }
  return {worst_loss <= 1e-9 && worst_grad <= 1e-4,
          "max initial-loss error " + Fmt(worst_loss) + ", max gradient relative error " +
              Fmt(worst_grad) + " over 50 batches"};
}

Outcome KneserNey() {
  NGramOptions toy_opts;
  toy_opts.order = 2;
  toy_opts.fixed_discount = 0.75;
  toy_opts.pad_sentences = false;
  toy_opts.unk_pseudo_count = 0;
  auto toy = NGramModel::Train({{"a", "b"}, {"a", "b"}, {"a", "c"}}, toy_opts);
  const double pba = toy.Prob({"a"}, "b");
  const bool toy_ok = std::abs(pba - 2.0 / 3.0) <= 1e-9;

  std::mt19937 rng(3);
  double worst = 0;
  int distributions = 0;
  for (int trial = 0; trial < 100; ++trial) {
    NGramModel::Corpus corpus;
    const int vocab = 2 + static_cast<int>(rng() % 8);
    for (int i = 0, n = 1 + static_cast<int>(rng() % 12); i < n; ++i) {
      std::vector<std::string> s;
      for (int j = 0, len = 1 + static_cast<int>(rng() % 6); j < len; ++j) {
        s.push_back("w" + std::to_string(rng() % vocab));
      }
      corpus.push_back(s);
    }
    for (int order : {2, 3}) {
      NGramOptions opts;
      opts.order = order;
      auto m = NGramModel::Train(corpus, opts);
      const auto words = m.vocabulary();
      // Every history seen in training plus random ones.
      std::set<std::vector<std::string>> histories;
      for (const auto &s : corpus) {
        std::vector<std::string> padded(order - 1, "<s>");
        padded.insert(padded.end(), s.begin(), s.end());
        for (std::size_t i = 0; i + order - 1 <= padded.size(); ++i) {
          histories.insert({padded.begin() + i, padded.begin() + i + order - 1});
        }
      }
      for (int r = 0; r < 10; ++r) {
        std::vector<std::string> h;
        for (int j = 0; j < order - 1; ++j) h.push_back(words[rng() % words.size()]);
        histories.insert(h);
      }
      for (const auto &h : histories) {
        double total = 0;
        for (const auto &w : words) total += m.Prob(h, w);
        worst = std::max(worst, std::abs(total - 1.0));
        ++distributions;
      }
    }
  }
  return {toy_ok && worst <= 1e-6,
          "p(b|a) = " + Fmt(pba) + "; " + std::to_string(distributions) +
              " distributions, max |sum - 1| = " + Fmt(worst)};
}

Outcome MetricOracles() {
  std::mt19937 rng(1234);
  int mismatches = 0, sets = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 100);
    std::vector<double> s;
    std::vector<int> l;
    for (int i = 0; i < n; ++i) {
      // Coarse scores so ties occur.
      s.push_back(static_cast<double>(rng() % 20) / 20.0);
      l.push_back(rng() % 3 == 0);
    }
    l[rng() % n] = 1;
    ++sets;
    ScoredGroup g{"g", s, l, {}};
    auto got = MaxF1({g});
    auto ref = testing::ReferenceMaxF1(s, l);
    if (got.value != ref.value || got.threshold != ref.threshold ||
        PrAuc({g}) != testing::ReferenceAveragePrecision(s, l)) {
      ++mismatches;
    }
  }
  // P@1 against a direct argmax over groups with distinct scores.
  int p1_bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<ScoredGroup> groups;
    double hits = 0;
    for (int q = 0, nq = 1 + static_cast<int>(rng() % 20); q < nq; ++q) {
      ScoredGroup g{"q" + std::to_string(q), {}, {}, {}};
      std::uniform_real_distribution<double> u(0, 1);
      for (int c = 0, nc = 1 + static_cast<int>(rng() % 10); c < nc; ++c) {
        g.scores.push_back(u(rng));
        g.labels.push_back(rng() % 2);
      }
      hits += g.labels[std::max_element(g.scores.begin(), g.scores.end()) - g.scores.begin()];
      groups.push_back(g);
    }
    p1_bad += PrecisionAtOne(groups) != hits / groups.size();
  }
  return {mismatches == 0 && p1_bad == 0,
          std::to_string(sets - mismatches) + "/" + std::to_string(sets) +
              " sets exact for max_f1 and pr_auc; " + std::to_string(1000 - p1_bad) +
              "/1000 p_at_1 exact"};
}

Outcome TreeEngine() {
  std::mt19937 rng(77);
  const std::vector<std::string> labels = {"S", "NP-SBJ", "VP", "PRP$", "-NONE-", "X=1",
                                           ".", ",", "WHNP", "SBARQ"};
  const std::vector<std::string> tokens = {"a", "B", "-LRB-", "*T*-1", "?", "don't", "3.5"};
  int trips = 0;
  for (int i = 0; i < 1000; ++i) {
    ParseTree t = testing::RandomTree(rng, labels, tokens, 40);
    const std::string text = ToPtb(t);
    ParseTree back = ParsePtb(text);
    trips += back == t && ToPtb(back) == text;
  }
  std::mt19937 prng(2024);
  const std::vector<std::string> plabels = {"A", "B", "C", "D", "AB", "CA"};
  int agree = 0;
  for (int i = 0; i < 500; ++i) {
    ParseTree tree = testing::RandomTree(prng, plabels, {"x", "y"}, 14);
    testing::OraclePattern pat = testing::RandomPattern(prng, 4);
    agree += Match(TreePattern::Compile(pat.Render()), tree) ==
             testing::BruteForceMatch(pat, tree);
  }
  return {trips == 1000 && agree == 500,
          std::to_string(trips) + "/1000 round trips, " + std::to_string(agree) +
              "/500 pattern pairs agree"};
}

Outcome SeparableToy() {
  std::mt19937 rng(5);
  std::vector<FeatureGroup> groups;
  for (int g = 0; g < 40; ++g) {
    FeatureGroup fg{"g" + std::to_string(g), {}, {}, {}};
    const int good = static_cast<int>(rng() % 8);
    for (int c = 0; c < 8; ++c) {
      FeatureVector v = RandomVector(rng, 0.3);
      v[0] = c == good ? 1.0 : 0.0;
      fg.features.push_back(v);
      fg.labels.push_back(c == good);
      fg.tokens.push_back(std::vector<std::string>(1 + c, "w"));
    }
    groups.push_back(fg);
  }
  std::string detail;
  bool pass = true;
  for (LossKind loss : {LossKind::kLogistic, LossKind::kSoftmax}) {
    const auto start = Clock::now();
    TrainOptions o;
    o.epochs = 100;
    auto model = TrainRanker(groups, loss, o).model;
    const double secs = Seconds(start);
    double hits = 0;
    for (const auto &g : groups) hits += g.labels[Rank(model, g).order[0]];
    const double p1 = hits / groups.size();
    pass &= p1 == 1.0 && secs < 10;
    detail += std::string(detail.empty() ? "" : ", ") + std::string(LossName(loss)) +
              " P@1 " + Fmt(p1) + " in " + Fmt(secs) + " s";
  }
  return {pass, detail};
}

}  // namespace
}  // namespace fluentqa

int main() {
  using namespace fluentqa;
  Pipeline pipeline;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"rise-up-example", RiseUpExample},
      {"fallback-contract", Fallback},
      {"baseline-ordering", [&] { return BaselineOrdering(pipeline); }},
      {"loss-sanity", LossSanity},
      {"kn-normalization", KneserNey},
      {"metric-oracles", MetricOracles},
      {"tree-engine", TreeEngine},
      {"augmentation-contract", [&] { return AugmentContract(pipeline); }},
      {"separable-toy", SeparableToy},
  };
  int failures = 0;
  for (const auto &[name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  std::cout << criteria.size() - failures << "/" << criteria.size() << " criteria pass"
            << std::endl;
  return failures ? 1 : 0;
}
