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

#ifndef SLU_SYNTHETIC_H_
#define SLU_SYNTHETIC_H_

#include <cstdint>

#include "slu/corpus.h"

namespace slu {

struct SyntheticOptions {
  int num_dialogs = 60;
  int min_utterances = 4;
  int max_utterances = 10;
  uint64_t seed = 1;
};

// Ontology the generator draws from: five main categories with
// subcategories and, for some, relative and from-to modifiers.
Ontology SyntheticOntology();

// Seeded corpus with known ground truth:
//  - each speech-act pair has its own keyword token;
//  - the category follows the discourse state: a "?" makes a question, a
//    speaker change after a question makes a response, otherwise guides
//    initiate and tourists follow up;
//  - entities come from disjoint per-(main, sub) lexicons, and a cue word in
//    front of an entity ("near", "from", ...) carries its relative or
//    from-to modifier.
Corpus GenerateSyntheticCorpus(const SyntheticOptions &options);

}  // namespace slu

#endif  // SLU_SYNTHETIC_H_
