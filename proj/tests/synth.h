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
//
// Synthetic bilingual worlds used by the acceptance suite. Everything is
// written to disk as ordinary input files and consumed through the same
// command layer as real data.

#ifndef PHONORANK_TESTS_SYNTH_H_
#define PHONORANK_TESTS_SYNTH_H_

#include <string>

#include "config.h"

namespace phonorank {
namespace testing {

// A bilingual toy world with a shared 10-phoneme inventory: 50 CV/CVC words
// per language, a mixed CS + monolingual tagged corpus. Every alternative
// type is generatable for every gold, so the full dataset contract applies.
struct OverlapWorld {
  std::string dir;
  RunConfig config;  // lexicon + corpus paths filled in, gen defaults set
};
OverlapWorld make_overlap_world(const std::string& dir, int n_sentences, uint64_t seed);

// Two languages with fully disjoint phoneme alphabets and 3-phoneme words.
// Sentences follow sparse per-language bigram grammars, so corrupted
// alternatives are structurally distinguishable and the ranking task is
// learnable. The tagged corpus is all code-switched; the monolingual files
// hold single-language sentences from the same grammars.
struct DisjointWorld {
  std::string dir;
  RunConfig config;
};
DisjointWorld make_disjoint_world(const std::string& dir, int n_cs_sentences, int n_mono_lines,
                                  uint64_t seed);

}  // namespace testing
}  // namespace phonorank

#endif  // PHONORANK_TESTS_SYNTH_H_
