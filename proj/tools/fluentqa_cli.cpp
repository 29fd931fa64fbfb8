// fluentqa_cli.cpp
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
// Command-line driver: generate, train-lm, train-ranker, rank, eval,
// build-sg, augment, agreement and replay.
//
// Exit codes: 0 success, 1 data error, 2 usage error, 3 augment health check
// failed. Every run that writes files also writes a manifest next to its
// primary output.

#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fluentqa/fluentqa.hpp"

namespace fs = std::filesystem;

namespace fluentqa {
namespace {

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;
constexpr int kExitHealth = 3;

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Results must be
// written by index; the first failure in index order is rethrown.
template <class Fn>
void ParallelFor(std::size_t n, int jobs, Fn fn) {
  std::vector<std::exception_ptr> errors(n);
  auto run = [&](std::size_t i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) run(i);
      });
    }
    for (auto &t : pool) t.join();
  }
  for (auto &e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// A library error located in an input file.
class InputError : public std::runtime_error {
 public:
  InputError(const std::string &path, std::size_t line, ErrorKind kind,
             const std::string &message)
      : std::runtime_error(path + (line ? ":" + std::to_string(line) : "") + ": " +
                           std::string(ErrorKindName(kind)) + ": " + message) {}
};

// Per-run bookkeeping for the manifest.
struct Run {
  std::uint64_t seed = 13;
  int jobs = 1;
  std::string manifest;
  std::vector<std::string> argv;
  std::map<std::string, std::string> inputs;
  std::map<std::string, std::string> outputs;
  std::string primary_output;

  std::string Read(const std::string &path) {
    std::string text = ReadFile(path);
    inputs[path] = HexHash(Fnv1a64(text));
    return text;
  }

  void Write(const std::string &path, const std::string &content) {
    if (fs::path(path).has_parent_path()) {
      fs::create_directories(fs::path(path).parent_path());
    }
    WriteFile(path, content);
    outputs[path] = HexHash(Fnv1a64(content));
    if (primary_output.empty()) primary_output = path;
  }
};

// JSONL records with their line numbers; errors name the file.
std::vector<std::pair<Json, std::size_t>> ReadRecords(Run &run,
                                                      const std::string &path) {
  std::istringstream in(run.Read(path));
  std::vector<std::pair<Json, std::size_t>> out;
  try {
    ForEachJsonl(in, [&](const Json &j, std::size_t line) {
      out.emplace_back(j, line);
    });
  } catch (const Error &e) {
    throw InputError(path, e.line(), e.kind(), e.message());
  }
  return out;
}

// Converts each record with `fn`, in parallel, reporting failures with the
// record's line.
template <class T, class Fn>
std::vector<T> ConvertRecords(const std::vector<std::pair<Json, std::size_t>> &records,
                              const std::string &path, int jobs, Fn fn) {
  std::vector<std::optional<T>> out(records.size());
  ParallelFor(records.size(), jobs, [&](std::size_t i) {
    try {
      out[i].emplace(fn(records[i].first));
    } catch (const Error &e) {
      throw InputError(path, records[i].second, e.kind(), e.message());
    } catch (const Json::exception &e) {
      throw InputError(path, records[i].second, ErrorKind::kDataError, e.what());
    } catch (const std::invalid_argument &e) {
      throw InputError(path, records[i].second, ErrorKind::kDataError, e.what());
    }
  });
  std::vector<T> result;
  result.reserve(out.size());
  for (auto &o : out) result.push_back(std::move(*o));
  return result;
}

NGramModel LoadLm(Run &run, const std::string &path) {
  std::istringstream in(run.Read(path));
  try {
    return NGramModel::FromArpa(in);
  } catch (const Error &e) {
    throw InputError(path, e.line(), e.kind(), e.message());
  }
}

RankerModel LoadModel(Run &run, const std::string &path) {
  try {
    return RankerModel::FromJson(Json::parse(run.Read(path)));
  } catch (const Json::exception &e) {
    throw InputError(path, 0, ErrorKind::kDataError, e.what());
  }
}

RuleSet LoadRules(Run &run, const std::string &path) {
  if (path.empty()) return RuleSet::Bundled();
  try {
    return RuleSet::Parse(run.Read(path));
  } catch (const Error &e) {
    throw InputError(path, e.line(), e.kind(), e.message());
  }
}

// Groups from generate output or split files: instance fields plus
// candidates, with labels when present.
struct InputGroup {
  LabeledGroup group;
  bool has_labels = false;
};

InputGroup GroupFromJson(const Json &j) {
  InputGroup g{LabeledGroupFromJson(j), false};
  for (const auto &c : j.at("candidates")) g.has_labels |= c.contains("label");
  return g;
}

std::string Joined(const std::vector<std::string> &t) { return JoinTokens(t); }

// ---------------------------------------------------------------------------
// Subcommands

struct GenerateArgs {
  std::string input, output, rules;
  std::size_t cap = 10000;
  bool keep_functional_tags = false;
};

int RunGenerate(Run &run, const GenerateArgs &a) {
  const RuleSet rules = LoadRules(run, a.rules);
  PtbReadOptions ptb{.strip_functional_tags = !a.keep_functional_tags};
  auto records = ReadRecords(run, a.input);
  GenerateOptions opts;
  opts.cap = a.cap;
  auto lines = ConvertRecords<std::string>(records, a.input, run.jobs, [&](const Json &j) {
    QAInstance inst = InstanceFromJson(j, ptb);
    auto gen = Generate(inst, rules, opts);
    Json out = InstanceToJson(inst);
    Json cands = Json::array();
    for (const auto &c : gen.candidates) cands.push_back(CandidateToJson(c));
    out["candidates"] = std::move(cands);
    out["fallback"] = gen.fallback;
    out["truncated"] = gen.truncated;
    return out.dump() + "\n";
  });
  std::string text;
  for (const auto &l : lines) text += l;
  run.Write(a.output, text);
  return 0;
}

struct TrainLmArgs {
  std::string input, output;
  int order = 3;
  std::optional<double> discount;
  double unk_count = 1.0;
};

int RunTrainLm(Run &run, const TrainLmArgs &a) {
  std::istringstream in(run.Read(a.input));
  NGramModel::Corpus corpus;
  std::string line;
  while (std::getline(in, line)) corpus.push_back(SplitTokens(line));
  NGramOptions opts;
  opts.order = a.order;
  opts.fixed_discount = a.discount;
  opts.unk_pseudo_count = a.unk_count;
  auto model = NGramModel::Train(corpus, opts);
  std::ostringstream out;
  model.WriteArpa(out);
  run.Write(a.output, out.str());
  return 0;
}

struct TrainRankerArgs {
  std::string train, lm2, lm3, output, report;
  std::string loss = "softmax";
  TrainOptions opts;
};

std::vector<FeatureGroup> FeaturizeFile(Run &run, const std::string &path,
                                        const FeatureExtractor &fx,
                                        std::vector<bool> *labeled = nullptr) {
  auto records = ReadRecords(run, path);
  auto groups = ConvertRecords<InputGroup>(records, path, run.jobs, GroupFromJson);
  std::vector<FeatureGroup> out(groups.size());
  ParallelFor(groups.size(), run.jobs, [&](std::size_t i) {
    out[i] = Featurize(fx, groups[i].group);
  });
  if (labeled) {
    labeled->clear();
    for (const auto &g : groups) labeled->push_back(g.has_labels);
  }
  return out;
}

int RunTrainRanker(Run &run, TrainRankerArgs a) {
  const auto lm2 = LoadLm(run, a.lm2), lm3 = LoadLm(run, a.lm3);
  FeatureExtractor fx(lm2, lm3);
  const LossKind loss = ParseLossKind(a.loss);
  auto groups = FeaturizeFile(run, a.train, fx);
  a.opts.seed = run.seed;
  auto result = TrainRanker(groups, loss, a.opts);
  run.Write(a.output, result.model.ToJson().dump(2) + "\n");
  run.Write(a.output + ".schema.json", FeatureSchemaJson().dump(2) + "\n");
  run.Write(a.report.empty() ? a.output + ".curve.csv" : a.report,
            CurveCsv(result.curve));
  return 0;
}

struct RankArgs {
  std::string input, output, scorer = "model", model, lm2, lm3, scores;
};

int RunRank(Run &run, const RankArgs &a) {
  auto records = ReadRecords(run, a.input);
  auto groups = ConvertRecords<InputGroup>(records, a.input, run.jobs, GroupFromJson);

  std::optional<NGramModel> lm2, lm3;
  std::optional<RankerModel> model;
  std::optional<ExternalScores> external;
  if (a.scorer == "model") {
    if (a.model.empty() || a.lm2.empty() || a.lm3.empty()) {
      throw CLI::ValidationError("--scorer model needs --model, --lm2 and --lm3");
    }
    model = LoadModel(run, a.model);
    lm2 = LoadLm(run, a.lm2);
    lm3 = LoadLm(run, a.lm3);
  } else if (a.scorer == "lm") {
    if (a.lm3.empty()) throw CLI::ValidationError("--scorer lm needs --lm3");
    lm3 = LoadLm(run, a.lm3);
  } else if (a.scorer == "external") {
    if (a.scores.empty()) throw CLI::ValidationError("--scorer external needs --scores");
    std::istringstream in(run.Read(a.scores));
    try {
      external = ReadExternalScores(in);
    } catch (const Error &e) {
      throw InputError(a.scores, e.line(), e.kind(), e.message());
    }
  }
  std::unique_ptr<FeatureExtractor> fx;
  if (model) fx = std::make_unique<FeatureExtractor>(*lm2, *lm3);

  std::vector<std::string> lines(groups.size());
  ParallelFor(groups.size(), run.jobs, [&](std::size_t i) {
    const auto &g = groups[i].group;
    const auto tokens = CandidateTokens(g.candidates);
    std::vector<double> scores;
    std::vector<double> probs;
    if (model) {
      auto fg = Featurize(*fx, g);
      auto ranked = Rank(*model, fg);
      scores = ranked.scores;
      probs = ranked.probabilities;
    } else if (external) {
      probs = ExternalScorer(*external)(g.instance, g.candidates);
      scores = probs;
    } else {
      // Baselines pick one winner, classified good; the rest are bad.
      std::size_t best = 0;
      if (!tokens.empty()) {
        best = a.scorer == "lm" ? LmBaselineRank(*lm3, tokens)
                                : ShortestResponseBaseline(tokens);
      }
      scores.assign(tokens.size(), 0.0);
      if (!tokens.empty()) scores[best] = 1.0;
      probs = scores;
    }
    Json out{{"id", g.instance.id},
             {"scorer", a.scorer},
             {"scores", scores},
             {"probabilities", probs},
             {"order", OrderByScore(probs, tokens)}};
    Json resp = Json::array();
    for (const auto &t : tokens) resp.push_back(Joined(t));
    out["responses"] = std::move(resp);
    if (groups[i].has_labels) out["labels"] = g.labels;
    lines[i] = out.dump() + "\n";
  });
  std::string text;
  for (const auto &l : lines) text += l;
  run.Write(a.output, text);
  return 0;
}

struct EvalArgs {
  std::string input, gold, output;
  bool macro = false;
};

int RunEval(Run &run, const EvalArgs &a) {
  std::map<std::string, std::map<std::string, int>> gold;
  if (!a.gold.empty()) {
    auto records = ReadRecords(run, a.gold);
    auto groups = ConvertRecords<InputGroup>(records, a.gold, 1, GroupFromJson);
    for (const auto &ig : groups) {
      auto &m = gold[ig.group.instance.id];
      for (std::size_t c = 0; c < ig.group.candidates.size(); ++c) {
        m[Joined(ig.group.candidates[c].tokens)] = ig.group.labels[c];
      }
    }
  }
  auto records = ReadRecords(run, a.input);
  auto scored = ConvertRecords<ScoredGroup>(records, a.input, 1, [&](const Json &j) {
    ScoredGroup g;
    g.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
    g.scores = j.at("probabilities").get<std::vector<double>>();
    const auto responses = j.at("responses").get<std::vector<std::string>>();
    for (const auto &r : responses) g.tokens.push_back(SplitTokens(r));
    if (!a.gold.empty()) {
      auto it = gold.find(g.id);
      if (it == gold.end()) {
        throw Error(ErrorKind::kDataError, "question '" + g.id + "' is not in the gold file");
      }
      for (const auto &r : responses) {
        auto l = it->second.find(r);
        if (l == it->second.end()) {
          throw Error(ErrorKind::kUnknownResponse,
                      "question '" + g.id + "' has no gold candidate '" + r + "'");
        }
        g.labels.push_back(l->second);
      }
    } else if (j.contains("labels")) {
      g.labels = j.at("labels").get<std::vector<int>>();
    } else {
      throw Error(ErrorKind::kDataError, "record has no labels; pass --gold");
    }
    if (g.labels.size() != g.scores.size() || g.tokens.size() != g.scores.size()) {
      throw Error(ErrorKind::kDataError, "scores, responses and labels differ in length");
    }
    return g;
  });
  Json report = MetricsReport(scored, a.macro);
  report["pooling"] = a.macro ? "macro" : "micro";
  const std::string text = report.dump(2) + "\n";
  if (a.output.empty()) {
    std::cout << text;
  } else {
    run.Write(a.output, text);
  }
  return 0;
}

struct BuildSgArgs {
  std::string instances, annotations, output_dir, rules;
  double train_ratio = 2000, val_ratio = 300, test_ratio = 700;
  std::size_t max_answer_tokens = 5;
  std::size_t cap = 10000;
  bool keep_parse_failures = false;
};

int RunBuildSg(Run &run, const BuildSgArgs &a) {
  const RuleSet rules = LoadRules(run, a.rules);
  PtbReadOptions ptb{.strip_functional_tags = true};
  auto inst_records = ReadRecords(run, a.instances);
  auto instances = ConvertRecords<QAInstance>(
      inst_records, a.instances, 1, [&](const Json &j) { return InstanceFromJson(j, ptb); });

  FilterOptions fo;
  fo.max_answer_tokens = a.max_answer_tokens;
  fo.keep_parse_failures = a.keep_parse_failures;
  auto filtered = FilterInstances(instances, fo);

  GenerateOptions go;
  go.cap = a.cap;
  std::vector<std::optional<GeneratedGroup>> slots(filtered.kept.size());
  ParallelFor(slots.size(), run.jobs, [&](std::size_t i) {
    slots[i].emplace(
        GeneratedGroup{filtered.kept[i], Generate(filtered.kept[i], rules, go).candidates});
  });
  std::vector<GeneratedGroup> generated;
  for (auto &s : slots) generated.push_back(std::move(*s));

  auto ann_records = ReadRecords(run, a.annotations);
  auto annotations = ConvertRecords<AnnotationRecord>(ann_records, a.annotations, 1,
                                                      AnnotationFromJson);

  auto kinds = AssignSplits(generated.size(), SplitRatios{a.train_ratio, a.val_ratio, a.test_ratio},
                            run.seed);
  Json stats;
  stats["filter"] = {{"input", instances.size()},
                     {"kept", filtered.kept.size()},
                     {"dropped", filtered.drop_counts}};
  for (SplitKind kind : {SplitKind::kTrain, SplitKind::kVal, SplitKind::kTest}) {
    std::vector<GeneratedGroup> part;
    for (std::size_t i = 0; i < generated.size(); ++i) {
      if (kinds[i] == kind) part.push_back(generated[i]);
    }
    SGSplit split;
    try {
      split = BuildLabels(part, annotations, kind);
    } catch (const Error &e) {
      const std::size_t line =
          e.line() >= 1 && e.line() <= ann_records.size() ? ann_records[e.line() - 1].second : 0;
      throw InputError(a.annotations, line, e.kind(), e.message());
    }
    std::string text;
    std::size_t candidates = 0, positives = 0;
    for (const auto &g : split.groups) {
      text += LabeledGroupToJson(g).dump() + "\n";
      candidates += g.candidates.size();
      for (int l : g.labels) positives += l;
    }
    const std::string name(SplitName(kind));
    run.Write((fs::path(a.output_dir) / (name + ".jsonl")).string(), text);
    stats[name] = {{"questions", split.groups.size()},
                   {"candidates", candidates},
                   {"positives", positives},
                   {"dropped_no_positive", split.dropped}};
  }
  run.Write((fs::path(a.output_dir) / "sg_stats.json").string(), stats.dump(2) + "\n");
  return 0;
}

struct AugmentArgs {
  std::string input, output, report, model, lm2, lm3, scores, rules;
  double threshold = 0.5;
  std::size_t top_k = 3;
  std::size_t cap = 10000;
  double max_empty_fraction = 0.5;
};

int RunAugment(Run &run, const AugmentArgs &a) {
  const RuleSet rules = LoadRules(run, a.rules);
  std::optional<NGramModel> lm2, lm3;
  std::optional<RankerModel> model;
  std::optional<ExternalScores> external;
  std::unique_ptr<FeatureExtractor> fx;
  CandidateScorer scorer;
  if (!a.scores.empty()) {
    std::istringstream in(run.Read(a.scores));
    try {
      external = ReadExternalScores(in);
    } catch (const Error &e) {
      throw InputError(a.scores, e.line(), e.kind(), e.message());
    }
    scorer = ExternalScorer(*external);
  } else {
    if (a.model.empty() || a.lm2.empty() || a.lm3.empty()) {
      throw CLI::ValidationError("augment needs --model, --lm2 and --lm3, or --scores");
    }
    model = LoadModel(run, a.model);
    lm2 = LoadLm(run, a.lm2);
    lm3 = LoadLm(run, a.lm3);
    fx = std::make_unique<FeatureExtractor>(*lm2, *lm3);
    scorer = ModelScorer(*model, *fx);
  }
  PtbReadOptions ptb{.strip_functional_tags = true};
  auto records = ReadRecords(run, a.input);
  AugmentOptions opts;
  opts.threshold = a.threshold;
  opts.top_k = a.top_k;
  opts.generate.cap = a.cap;
  auto per = ConvertRecords<QuestionAugment>(records, a.input, run.jobs, [&](const Json &j) {
    return AugmentQuestion(InstanceFromJson(j, ptb), rules, scorer, opts);
  });
  AugmentReport report;
  std::string text;
  for (const auto &q : per) {
    Accumulate(q, report);
    for (const auto &r : q.records) text += r.dump() + "\n";
  }
  run.Write(a.output, text);
  Json rj = report.ToJson();
  rj["threshold"] = a.threshold;
  rj["top_k"] = a.top_k;
  rj["empty_fraction"] = report.EmptyFraction();
  rj["health_check"] = report.EmptyFraction() > a.max_empty_fraction ? "failed" : "ok";
  run.Write(a.report.empty() ? a.output + ".report.json" : a.report, rj.dump(2) + "\n");
  if (report.EmptyFraction() > a.max_empty_fraction) {
    std::cerr << "fluentqa: health check failed: " << report.empty_questions.size()
              << " of " << report.instances << " questions emitted no response\n";
    return kExitHealth;
  }
  return 0;
}

struct AgreementArgs {
  std::string annotations, output;
};

int RunAgreement(Run &run, const AgreementArgs &a) {
  auto records = ReadRecords(run, a.annotations);
  auto ann = ConvertRecords<AnnotationRecord>(records, a.annotations, 1, AnnotationFromJson);
  std::set<std::string> annotators, questions;
  for (const auto &r : ann) {
    annotators.insert(r.annotator_id);
    questions.insert(r.question_id);
  }
  Json out{{"agreement", AnnotatorAgreement(ann)},
           {"annotations", ann.size()},
           {"annotators", annotators.size()},
           {"questions", questions.size()}};
  const std::string text = out.dump(2) + "\n";
  if (a.output.empty()) {
    std::cout << text;
  } else {
    run.Write(a.output, text);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Config files and manifests

const std::vector<std::string> kCommands = {"generate", "train-lm", "train-ranker",
                                            "rank",     "eval",     "build-sg",
                                            "augment",  "agreement", "replay"};

bool HasFlag(const std::vector<std::string> &args, const std::string &name) {
  for (const auto &s : args) {
    if (s == "--" + name || s.rfind("--" + name + "=", 0) == 0) return true;
  }
  return false;
}

// Appends config entries that the command line does not already set.
std::vector<std::string> MergeConfig(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  Json cfg;
  try {
    cfg = Json::parse(ReadFile(path));
  } catch (const Json::exception &e) {
    throw InputError(path, 0, ErrorKind::kDataError, e.what());
  }
  if (!cfg.is_object()) {
    throw InputError(path, 0, ErrorKind::kDataError, "config must be an object");
  }
  for (const auto &[key, value] : cfg.items()) {
    if (key == "config" || HasFlag(args, key)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back("--" + key);
    } else if (value.is_array()) {
      for (const auto &v : value) {
        args.push_back("--" + key);
        args.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      }
    } else {
      args.push_back("--" + key);
      args.push_back(value.is_string() ? value.get<std::string>() : value.dump());
    }
  }
  return args;
}

Json OptionValues(const CLI::App &app) {
  Json j = Json::object();
  for (const CLI::Option *opt : app.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help" || name == "version") continue;
    if (opt->count() > 0) {
      const auto &res = opt->results();
      if (opt->get_expected_max() == 0) {
        j[name] = true;
      } else if (res.size() == 1) {
        j[name] = res.front();
      } else {
        j[name] = res;
      }
    } else if (!opt->get_default_str().empty()) {
      j[name] = opt->get_default_str();
    }
  }
  return j;
}

void WriteManifest(Run &run, const std::string &command, const CLI::App &root,
                   const CLI::App &sub) {
  if (run.outputs.empty() && run.manifest.empty()) return;
  Json m;
  m["tool"] = "fluentqa";
  m["version"] = kVersion;
  m["feature_schema"] = kFeatureSchemaVersion;
  m["command"] = command;
  m["argv"] = run.argv;
  m["seed"] = run.seed;
  m["jobs"] = run.jobs;
  m["global_options"] = OptionValues(root);
  m["options"] = OptionValues(sub);
  m["inputs"] = run.inputs;
  m["outputs"] = run.outputs;
  std::string path = run.manifest;
  if (path.empty()) path = run.primary_output + ".manifest.json";
  WriteFile(path, m.dump(2) + "\n");
}

int Main(std::vector<std::string> args);

int RunReplay(const std::string &manifest_path) {
  Json m;
  try {
    m = Json::parse(ReadFile(manifest_path));
  } catch (const Json::exception &e) {
    throw InputError(manifest_path, 0, ErrorKind::kDataError, e.what());
  }
  auto argv = m.at("argv").get<std::vector<std::string>>();
  const auto expected = m.at("outputs").get<std::map<std::string, std::string>>();
  const int rc = Main(argv);
  if (rc != 0 && rc != kExitHealth) return rc;
  int mismatches = 0;
  for (const auto &[path, hash] : expected) {
    const std::string now = HexHash(Fnv1a64(ReadFile(path)));
    if (now != hash) {
      std::cerr << "fluentqa: replay: " << path << " differs (" << now << " != " << hash
                << ")\n";
      ++mismatches;
    }
  }
  std::cout << "replay: " << expected.size() - mismatches << "/" << expected.size()
            << " outputs identical\n";
  return mismatches ? kExitData : rc;
}

int Main(std::vector<std::string> args) {
  args = MergeConfig(std::move(args));

  CLI::App app{"Over-generate and rank fluent responses for extractive QA.", "fluentqa"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(kVersion));

  Run run;
  std::string config;
  app.add_option("--seed", run.seed, "Seed for every random choice");
  app.add_option("--jobs", run.jobs, "Worker threads; output order is fixed")
      ->check(CLI::PositiveNumber);
  app.add_option("--config", config, "JSON file with option values; flags win");
  app.add_option("--manifest", run.manifest,
                 "Manifest path (default: <primary output>.manifest.json)");

  GenerateArgs gen;
  auto *g = app.add_subcommand("generate", "QA instances JSONL -> candidates JSONL");
  g->add_option("--input", gen.input, "Instances JSONL")->required();
  g->add_option("--output", gen.output, "Candidates JSONL")->required();
  g->add_option("--rules", gen.rules, "Rule file (default: bundled rules)");
  g->add_option("--cap", gen.cap, "Maximum candidates per question");
  g->add_flag("--keep-functional-tags", gen.keep_functional_tags,
              "Do not strip -SBJ style tags from input trees");

  TrainLmArgs tlm;
  auto *l = app.add_subcommand("train-lm", "Corpus (one sentence per line) -> ARPA");
  l->add_option("--input", tlm.input, "Training corpus")->required();
  l->add_option("--output", tlm.output, "ARPA file")->required();
  l->add_option("--order", tlm.order, "N-gram order")->check(CLI::Range(1, 9));
  l->add_option("--discount", tlm.discount, "Fixed discount for every count class");
  l->add_option("--unk-count", tlm.unk_count, "Pseudo-count reserved for <unk>");

  TrainRankerArgs trk;
  auto *t = app.add_subcommand("train-ranker", "Labeled split -> model JSON + curve CSV");
  t->add_option("--train", trk.train, "Training split JSONL")->required();
  t->add_option("--lm2", trk.lm2, "Bigram ARPA")->required();
  t->add_option("--lm3", trk.lm3, "Trigram ARPA")->required();
  t->add_option("--output", trk.output, "Model JSON")->required();
  t->add_option("--report", trk.report, "Curve CSV (default: <output>.curve.csv)");
  t->add_option("--loss", trk.loss, "Training loss")
      ->check(CLI::IsMember({"logistic", "softmax"}));
  t->add_option("--epochs", trk.opts.epochs, "Epochs");
  t->add_option("--learning-rate", trk.opts.learning_rate, "Initial step size");
  t->add_option("--l2", trk.opts.l2, "L2 penalty");
  t->add_option("--batch-groups", trk.opts.batch_groups, "Questions per mini-batch");
  t->add_option("--negatives-per-unit", trk.opts.negatives_per_unit,
                "Responses per softmax unit (0 = all negatives)");
  t->add_option("--decay-every", trk.opts.decay_every, "Epochs between step decays");
  t->add_option("--decay-factor", trk.opts.decay_factor, "Step decay factor");

  RankArgs rk;
  auto *r = app.add_subcommand("rank", "Candidate groups -> scored JSONL");
  r->add_option("--input", rk.input, "Candidates or split JSONL")->required();
  r->add_option("--output", rk.output, "Scored JSONL")->required();
  r->add_option("--scorer", rk.scorer, "Scoring method")
      ->check(CLI::IsMember({"model", "shortest", "lm", "external"}));
  r->add_option("--model", rk.model, "Model JSON");
  r->add_option("--lm2", rk.lm2, "Bigram ARPA");
  r->add_option("--lm3", rk.lm3, "Trigram ARPA");
  r->add_option("--scores", rk.scores, "External scores JSONL {id, response, probability}");

  EvalArgs ev;
  auto *e = app.add_subcommand("eval", "Scored JSONL (+ gold split) -> metrics JSON");
  e->add_option("--input", ev.input, "Scored JSONL")->required();
  e->add_option("--gold", ev.gold, "Labeled split JSONL");
  e->add_option("--output", ev.output, "Metrics JSON (default: stdout)");
  e->add_flag("--macro", ev.macro, "Average Max-F1 and PR-AUC over questions");

  BuildSgArgs sg;
  auto *b = app.add_subcommand("build-sg", "Instances + annotations -> train/val/test");
  b->add_option("--instances", sg.instances, "Instances JSONL")->required();
  b->add_option("--annotations", sg.annotations, "Annotations JSONL")->required();
  b->add_option("--output-dir", sg.output_dir, "Directory for the split files")->required();
  b->add_option("--rules", sg.rules, "Rule file (default: bundled rules)");
  b->add_option("--train-ratio", sg.train_ratio, "Relative size of train");
  b->add_option("--val-ratio", sg.val_ratio, "Relative size of val");
  b->add_option("--test-ratio", sg.test_ratio, "Relative size of test");
  b->add_option("--max-answer-tokens", sg.max_answer_tokens, "Longer answers are dropped");
  b->add_option("--cap", sg.cap, "Maximum candidates per question");
  b->add_flag("--keep-parse-failures", sg.keep_parse_failures,
              "Keep questions without SBARQ/SQ");

  AugmentArgs au;
  auto *a = app.add_subcommand("augment", "Instances + model -> response triples JSONL");
  a->add_option("--input", au.input, "Instances JSONL")->required();
  a->add_option("--output", au.output, "Triples JSONL")->required();
  a->add_option("--report", au.report, "Report JSON (default: <output>.report.json)");
  a->add_option("--model", au.model, "Model JSON");
  a->add_option("--lm2", au.lm2, "Bigram ARPA");
  a->add_option("--lm3", au.lm3, "Trigram ARPA");
  a->add_option("--scores", au.scores, "External scores JSONL instead of a model");
  a->add_option("--rules", au.rules, "Rule file (default: bundled rules)");
  a->add_option("--threshold", au.threshold, "Minimum probability");
  a->add_option("--top-k", au.top_k, "Responses per question");
  a->add_option("--cap", au.cap, "Maximum candidates per question");
  a->add_option("--max-empty-fraction", au.max_empty_fraction,
                "Fail when more questions than this emit nothing");

  AgreementArgs ag;
  auto *ar = app.add_subcommand("agreement", "Annotations -> weighted agreement");
  ar->add_option("--annotations", ag.annotations, "Annotations JSONL")->required();
  ar->add_option("--output", ag.output, "Result JSON (default: stdout)");

  std::string manifest_in;
  auto *rp = app.add_subcommand("replay", "Re-run a manifest and compare outputs");
  rp->add_option("manifest", manifest_in, "Manifest JSON")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp &ex) {
    return app.exit(ex);
  } catch (const CLI::CallForAllHelp &ex) {
    return app.exit(ex);
  } catch (const CLI::CallForVersion &ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError &ex) {
    app.exit(ex);
    return kExitUsage;
  }
  run.argv = args;

  CLI::App *sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  int rc = 0;
  try {
    if (name == "replay") return RunReplay(manifest_in);
    if (name == "generate") rc = RunGenerate(run, gen);
    if (name == "train-lm") rc = RunTrainLm(run, tlm);
    if (name == "train-ranker") rc = RunTrainRanker(run, trk);
    if (name == "rank") rc = RunRank(run, rk);
    if (name == "eval") rc = RunEval(run, ev);
    if (name == "build-sg") rc = RunBuildSg(run, sg);
    if (name == "augment") rc = RunAugment(run, au);
    if (name == "agreement") rc = RunAgreement(run, ag);
  } catch (const CLI::ValidationError &ex) {
    std::cerr << "fluentqa: " << ex.what() << "\n";
    return kExitUsage;
  }
  WriteManifest(run, name, app, *sub);
  return rc;
}

}  // namespace
}  // namespace fluentqa

int main(int argc, char **argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return fluentqa::Main(args);
  } catch (const fluentqa::Error &e) {
    std::cerr << "fluentqa: error: " << e.what() << "\n";
    return fluentqa::kExitData;
  } catch (const std::exception &e) {
    std::cerr << "fluentqa: error: " << e.what() << "\n";
    return fluentqa::kExitData;
  }
}
