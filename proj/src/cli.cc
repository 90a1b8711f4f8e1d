// Copyright 2026 The SLU Toolkit Authors.
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

#include "slu/cli.h"

#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

namespace slu {

using nlohmann::json;

namespace {

constexpr const char *kGrammar = R"(Commands:
  gen      --out CORPUS [--ontology ONTOLOGY] [--seed N] [--dialogs N]
  train    --task speech-act --system S1..S5 --corpus CORPUS --out MODEL [--rules RULES]
  train    --task semantic --corpus CORPUS --ontology ONTOLOGY --out MODEL
  predict  --model MODEL --corpus CORPUS --out PREDICTED
  eval     --task TASK --corpus GOLD --pred PREDICTED [--system S] [--out REPORT]
  cv       --task TASK [--system S] --corpus CORPUS [--ontology O] [--rules R] --out TABLE
Common flags: --task --system --corpus --ontology --model --rules --out --seed --config
Exit status: 0 success, 1 runtime failure, 2 usage error.
)";

Task ParseTask(const std::string &name) {
  if (name == "speech-act" || name == "speech_act") return Task::kSpeechAct;
  if (name == "semantic") return Task::kSemantic;
  throw UsageError("--task must be 'speech-act' or 'semantic', got '" + name + "'");
}

const char *TaskName(Task task) {
  return task == Task::kSpeechAct ? "speech-act" : "semantic";
}

void ApplyConfigFile(const std::string &path, RunConfig &config) {
  json doc;
  try {
    doc = json::parse(ReadFile(path));
  } catch (const json::parse_error &e) {
    throw UsageError(path + ": " + e.what());
  }
  if (!doc.is_object()) throw UsageError(path + ": config must be a mapping");
  try {
    for (const auto &[key, value] : doc.items()) {
      if (key == "task") {
        config.task = ParseTask(value.get<std::string>());
      } else if (key == "system") {
        config.system = ParseSystemId(value.get<std::string>());
      } else if (key == "corpus") {
        config.corpus = value.get<std::string>();
      } else if (key == "ontology") {
        config.ontology = value.get<std::string>();
      } else if (key == "model") {
        config.model = value.get<std::string>();
      } else if (key == "rules") {
        config.rules = value.get<std::string>();
      } else if (key == "out") {
        config.out = value.get<std::string>();
      } else if (key == "pred") {
        config.pred = value.get<std::string>();
      } else if (key == "seed") {
        config.seed = value.get<uint64_t>();
      } else if (key == "folds") {
        config.folds = value.get<int>();
      } else if (key == "speech_act") {
        for (const auto &[name, v] : value.items()) {
          ApplyHyperparam(config.speech_act, name, v.get<double>());
        }
      } else if (key == "semantic") {
        for (const auto &[name, v] : value.items()) {
          ApplyHyperparam(config.semantic, name, v.get<double>());
        }
      } else if (key == "grid") {
        config.grid.clear();
        for (const auto &[name, v] : value.items()) {
          config.grid.emplace_back(name, v.get<std::vector<double>>());
        }
      } else if (key == "gen") {
        for (const auto &[name, v] : value.items()) {
          if (name == "dialogs") {
            config.gen.num_dialogs = v.get<int>();
          } else if (name == "min_utterances") {
            config.gen.min_utterances = v.get<int>();
          } else if (name == "max_utterances") {
            config.gen.max_utterances = v.get<int>();
          } else {
            throw UsageError(path + ": unknown gen setting '" + name + "'");
          }
        }
      } else {
        throw UsageError(path + ": unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception &e) {
    throw UsageError(path + ": " + e.what());
  } catch (const UsageError &) {
    throw;
  } catch (const Error &e) {
    throw UsageError(path + ": " + e.what());
  }
}

void Require(const std::string &value, const char *flag, const char *command) {
  if (value.empty()) {
    throw UsageError(std::string(command) + ": missing required option " + flag);
  }
}

void Validate(RunConfig &config, const char *name) {
  const bool needs_task = config.command == Command::kTrain || config.command == Command::kEval ||
                          config.command == Command::kCv;
  if (needs_task && !config.task) throw UsageError(std::string(name) + ": missing required option --task");
  const bool speech = config.task == Task::kSpeechAct;
  switch (config.command) {
    case Command::kTrain:
    case Command::kCv:
      Require(config.corpus, "--corpus", name);
      Require(config.out, "--out", name);
      if (speech && !config.system) {
        throw UsageError(std::string(name) + ": missing required option --system for --task speech-act");
      }
      if (!speech && config.system) {
        throw UsageError(std::string(name) + ": --system applies only to --task speech-act");
      }
      if (!speech) Require(config.ontology, "--ontology", name);
      if (speech && config.system == SystemId::kS1) Require(config.rules, "--rules", name);
      break;
    case Command::kPredict:
      Require(config.model, "--model", name);
      Require(config.corpus, "--corpus", name);
      Require(config.out, "--out", name);
      break;
    case Command::kEval:
      Require(config.corpus, "--corpus", name);
      Require(config.pred, "--pred", name);
      break;
    case Command::kGen:
      Require(config.out, "--out", name);
      break;
  }
}

void Log(const std::string &line) { std::cerr << line << "\n"; }

std::string TaskOf(const AnyModel &model) {
  return std::holds_alternative<SpeechActModel>(model) ? "speech-act" : "semantic";
}

// Corpus document with predictions in the annotation fields and the input
// annotations, when present, moved under "gold_".
json PredictionDocument(const Corpus &input, const AnyModel &model) {
  json doc = CorpusToJson(input);
  json &dialogs = doc["dialogs"];
  for (size_t d = 0; d < input.dialogs.size(); ++d) {
    const Dialog &dialog = input.dialogs[d];
    json &utterances = dialogs[d]["utterances"];
    if (const auto *sa = std::get_if<SpeechActModel>(&model)) {
      const auto labels = PredictSpeechActs(*sa, dialog);
      for (size_t i = 0; i < labels.size(); ++i) {
        json &u = utterances[i];
        if (!dialog.utterances[i].speech_acts.empty()) u["gold_speech_acts"] = u["speech_acts"];
        u["speech_acts"] = json::array({SpeechActToJson(labels[i])});
      }
    } else {
      const auto &sem = std::get<SemanticModel>(model);
      for (size_t i = 0; i < dialog.utterances.size(); ++i) {
        json &u = utterances[i];
        if (!dialog.utterances[i].segments.empty()) u["gold_segments"] = u["segments"];
        json segments = json::array();
        for (const auto &seg : PredictSegments(sem, dialog.utterances[i])) {
          segments.push_back(SegmentToJson(seg));
        }
        u["segments"] = std::move(segments);
      }
    }
  }
  return doc;
}

}  // namespace

RunConfig ParseArgs(const std::vector<std::string> &args) {
  CLI::App app{"Spoken language understanding toolkit: speech-act recognition and "
               "semantic tagging."};
  app.footer(kGrammar);
  app.require_subcommand(1);

  std::string task, system, corpus, ontology, model, rules, out, pred, config_path;
  uint64_t seed = 1;
  double c = 0, l2 = 0;
  int trees = 0, folds = 0, dialogs = 0;

  struct Sub {
    CLI::App *app;
    Command command;
  };
  std::vector<Sub> subs;
  auto add = [&](const char *name, const char *help, Command command) {
    CLI::App *sub = app.add_subcommand(name, help);
    sub->add_option("--task", task, "speech-act | semantic");
    sub->add_option("--system", system, "S1..S5 (speech-act task)");
    sub->add_option("--corpus", corpus, "corpus file");
    sub->add_option("--ontology", ontology, "ontology file");
    sub->add_option("--model", model, "model file");
    sub->add_option("--rules", rules, "rule file for S1");
    sub->add_option("--out", out, "output file");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--config", config_path, "structured config file; flags override it");
    subs.push_back({sub, command});
    return sub;
  };
  add("gen", "write a seeded synthetic corpus", Command::kGen)
      ->add_option("--dialogs", dialogs, "number of dialogs");
  {
    CLI::App *train = add("train", "train a model", Command::kTrain);
    train->add_option("--c", c, "SVM penalty (S3)");
    train->add_option("--l2", l2, "L2 strength (S5, semantic)");
    train->add_option("--trees", trees, "forest size (S2, S4)");
  }
  add("predict", "annotate a corpus with a trained model", Command::kPredict);
  add("eval", "score predictions against gold", Command::kEval)
      ->add_option("--pred", pred, "predicted corpus");
  add("cv", "k-fold cross-validated grid search", Command::kCv)
      ->add_option("--folds", folds, "number of folds");

  std::vector<const char *> argv{"slu"};
  for (const auto &a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp &) {
    throw HelpRequested{app.help() };
  } catch (const CLI::ParseError &e) {
    std::ostringstream out_stream, err_stream;
    app.exit(e, out_stream, err_stream);
    std::string message = err_stream.str();
    while (!message.empty() && message.back() == '\n') message.pop_back();
    const size_t newline = message.find('\n');
    throw UsageError(newline == std::string::npos ? message : message.substr(0, newline));
  }

  RunConfig config;
  const Sub *chosen = nullptr;
  for (const Sub &s : subs) {
    if (s.app->parsed()) chosen = &s;
  }
  config.command = chosen->command;
  CLI::App *sub = chosen->app;
  const char *name = sub->get_name().c_str();
  auto given = [&](const char *flag) {
    try {
      return sub->get_option(flag)->count() > 0;
    } catch (const CLI::OptionNotFound &) {
      return false;
    }
  };

  if (given("--config")) ApplyConfigFile(config_path, config);
  if (given("--task")) config.task = ParseTask(task);
  if (given("--system")) {
    try {
      config.system = ParseSystemId(system);
    } catch (const Error &e) {
      throw UsageError(std::string("--system: ") + e.what());
    }
  }
  if (given("--corpus")) config.corpus = corpus;
  if (given("--ontology")) config.ontology = ontology;
  if (given("--model")) config.model = model;
  if (given("--rules")) config.rules = rules;
  if (given("--out")) config.out = out;
  if (given("--pred")) config.pred = pred;
  if (given("--seed")) config.seed = seed;
  if (given("--c")) config.speech_act.svm_c = c;
  if (given("--l2")) {
    config.speech_act.logreg_l2 = l2;
    config.semantic.l2 = l2;
  }
  if (given("--trees")) config.speech_act.forest.num_trees = trees;
  if (given("--folds")) config.folds = folds;
  if (given("--dialogs")) config.gen.num_dialogs = dialogs;
  config.gen.seed = config.seed;
  Validate(config, name);
  return config;
}

void Run(const RunConfig &config) {
  switch (config.command) {
    case Command::kGen: {
      const Corpus corpus = GenerateSyntheticCorpus(config.gen);
      WriteFileAtomic(config.out, CorpusToJson(corpus).dump(1) + "\n");
      if (!config.ontology.empty()) {
        WriteFileAtomic(config.ontology, OntologyToJson(SyntheticOntology()).dump(1) + "\n");
      }
      Log("gen: " + std::to_string(corpus.dialogs.size()) + " dialogs, " +
          std::to_string(corpus.NumUtterances()) + " utterances -> " + config.out);
      return;
    }
    case Command::kTrain: {
      const Corpus corpus = LoadCorpus(config.corpus);
      if (*config.task == Task::kSemantic) {
        const Ontology ontology = LoadOntology(config.ontology);
        SaveModel(TrainSemanticTagger(corpus, ontology, config.semantic), config.out);
        Log("train: semantic tagger -> " + config.out);
      } else {
        std::optional<RuleSet> rules;
        if (!config.rules.empty()) rules = LoadRuleset(config.rules);
        SaveModel(TrainSpeechActSystem(corpus, *config.system, config.speech_act, config.seed,
                                       rules ? &*rules : nullptr),
                  config.out);
        Log("train: " + SystemName(*config.system) + " -> " + config.out);
      }
      return;
    }
    case Command::kPredict: {
      const AnyModel model = LoadModel(config.model);
      if (config.task && TaskName(*config.task) != TaskOf(model)) {
        throw Error(config.model + ": holds a " + TaskOf(model) + " model, not " +
                    TaskName(*config.task));
      }
      const Corpus corpus = LoadCorpus(config.corpus);
      WriteFileAtomic(config.out, PredictionDocument(corpus, model).dump(1) + "\n");
      Log("predict: " + std::to_string(corpus.NumUtterances()) + " utterances -> " + config.out);
      return;
    }
    case Command::kEval: {
      const Corpus gold = LoadCorpus(config.corpus);
      const Corpus pred = LoadCorpus(config.pred);
      std::string row = "Semantic";
      EvalReport report;
      if (*config.task == Task::kSemantic) {
        report = EvalSegmentCorpora(gold, pred);
      } else {
        const bool category_only =
            config.system == SystemId::kS2 || config.system == SystemId::kS4;
        report = EvalSpeechActCorpora(gold, pred, category_only);
        row = config.system ? SystemName(*config.system) : "SpeechAct";
      }
      const std::vector<std::pair<std::string, EvalReport>> rows{{row, report}};
      std::cout << FormatReportTable(rows);
      if (!config.out.empty()) WriteFileAtomic(config.out, ReportToJson(rows).dump(2) + "\n");
      return;
    }
    case Command::kCv: {
      const Corpus corpus = LoadCorpus(config.corpus);
      Grid grid = DefaultGrid(*config.task, config.system.value_or(SystemId::kS5));
      if (!config.grid.empty()) grid.lists = config.grid;
      grid.folds = config.folds;
      grid.seed = config.seed;
      CvContext context;
      context.speech_act = config.speech_act;
      context.semantic = config.semantic;
      std::optional<Ontology> ontology;
      std::optional<RuleSet> rules;
      if (!config.ontology.empty()) ontology = LoadOntology(config.ontology);
      if (!config.rules.empty()) rules = LoadRuleset(config.rules);
      context.ontology = ontology ? &*ontology : nullptr;
      context.rules = rules ? &*rules : nullptr;
      const CvResult result = GridSearchCv(corpus, grid, context);
      WriteFileAtomic(config.out, CvResultToJson(result).dump(2) + "\n");
      Log("cv: best mean F1 " + std::to_string(result.table[result.best].mean_f1) + " -> " +
          config.out);
      return;
    }
  }
}

int Main(const std::vector<std::string> &args) {
  RunConfig config;
  try {
    config = ParseArgs(args);
  } catch (const HelpRequested &help) {
    std::cout << help.text;
    return 0;
  } catch (const UsageError &e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  try {
    Run(config);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace slu
