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

#ifndef SLU_CLI_H_
#define SLU_CLI_H_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "slu/common.h"
#include "slu/eval.h"
#include "slu/slu.h"
#include "slu/synthetic.h"

namespace slu {

enum class Command { kTrain, kPredict, kEval, kCv, kGen };

struct RunConfig {
  Command command = Command::kTrain;
  std::optional<Task> task;
  std::optional<SystemId> system;
  std::string corpus;
  std::string ontology;
  std::string model;
  std::string rules;
  std::string out;
  std::string pred;
  uint64_t seed = 1;
  int folds = 5;
  SpeechActHyperparams speech_act;
  SemanticHyperparams semantic;
  std::vector<std::pair<std::string, std::vector<double>>> grid;  // empty: defaults
  SyntheticOptions gen;
};

// Bad command line; exit status 2.
class UsageError : public Error {
 public:
  explicit UsageError(const std::string &what) : Error(what) {}
};

// --help; the text goes to stdout with exit status 0.
struct HelpRequested {
  std::string text;
};

// Throws UsageError or HelpRequested. A --config file is applied first and
// explicit flags override it.
RunConfig ParseArgs(const std::vector<std::string> &args);

// Executes one command. Throws slu::Error on failure; outputs are written
// atomically so a failed run leaves no partial files.
void Run(const RunConfig &config);

// Full entry point: parse, run, map failures to exit codes 0/1/2 with a
// one-line diagnostic on stderr.
int Main(const std::vector<std::string> &args);

}  // namespace slu

#endif  // SLU_CLI_H_
