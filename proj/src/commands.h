// Copyright 2026 The Phonorank Authors
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

#ifndef PHONORANK_SRC_COMMANDS_H_
#define PHONORANK_SRC_COMMANDS_H_

#include <string>
#include <vector>

#include "config.h"
#include "lexicon.h"

namespace phonorank {

// The five pipeline commands behind the CLI and the C API. Errors surface
// as ConfigError / DataError / NumericError; callers map them to exit or
// status codes.

// Loads, cleans and splits the corpora; writes per-split tagged text files,
// split manifests and a stats sidecar into corpus.out_dir.
void cmd_prep_corpus(const RunConfig& cfg);

// Compiles the lexicon transducers and generates the evaluation datasets
// (dev/test) plus discriminative training sets into gen.out_dir.
void cmd_gen_dataset(const RunConfig& cfg);

// Runs one training protocol to completion; writes a checkpoint and a run
// manifest into train.out_dir.
void cmd_train(const RunConfig& cfg);

// Scores a dataset with a checkpoint; writes <out_prefix>.json/.txt and
// returns the text report.
std::string cmd_evaluate(const RunConfig& cfg);

// Comparison table across run manifests and evaluation reports. Returns the
// text table; report.json_out / report.text_out additionally write files.
std::string cmd_report(const std::vector<std::string>& inputs, const RunConfig& cfg);

// Report internals, exposed so the JSON form can be checked to round-trip
// through the text renderer.
std::string report_json_from_files(const std::vector<std::string>& inputs);
std::string report_text_from_json(const std::string& report_json);

// Shared resource loading (also used by tests).
Lexicon build_lexicon_from_config(const RunConfig& cfg);

}  // namespace phonorank

#endif  // PHONORANK_SRC_COMMANDS_H_
