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

#ifndef PHONORANK_SRC_ALTGEN_H_
#define PHONORANK_SRC_ALTGEN_H_

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lexicon.h"

namespace phonorank {

enum class AltType : uint8_t { kCs = 0, kL1 = 1, kL2 = 2 };

const char* alt_type_name(AltType t);  // "cs" / "l1" / "l2"
AltType parse_alt_type(std::string_view s);

struct Alternative {
  std::vector<TaggedToken> tokens;
  AltType alt_type = AltType::kCs;
  double gen_cost = 0.0;    // FST path cost
  double heur_score = 0.0;

  std::vector<std::string> word_surfaces() const;
};

// One gold sentence with its typed alternatives; the unit of the ranking
// task.
struct EvalSet {
  std::string id;
  GoldSentence gold;
  std::array<std::vector<Alternative>, 3> alts;  // indexed by AltType

  const std::vector<Alternative>& alts_for(AltType t) const {
    return alts[static_cast<size_t>(t)];
  }
  size_t total_alternatives() const {
    return alts[0].size() + alts[1].size() + alts[2].size();
  }
};

struct GenerationConfig {
  int nbest = 1000;          // candidates decoded from the FST
  int top_k = 10;            // kept after heuristic rescoring
  int min_alternatives = 5;  // per type, below which the set is rejected
  int min_words = 3;         // gold words excluding punctuation
  double span_min_frac = 0.3;
  double span_max_frac = 0.7;
  double weight_cost = 1.0;      // on the FST path cost (negated)
  double weight_minority = 2.0;  // on the minority-language fraction
  double weight_word_len = 0.5;  // on the mean word length in characters
  uint64_t max_expansions = 1000000;
  // When false, a set is accepted if its *total* alternative count reaches
  // min_alternatives even if some type is empty (used for monolingual
  // pretraining sets whose cross-language decodes can be structurally
  // impossible).
  bool require_all_types = true;
};

// Raised when a gold token is missing from its language's lexicon. The
// offending sentence is skipped by the pipeline, not a fatal error.
class OovError : public DataError {
 public:
  explicit OovError(const std::string& token)
      : DataError("token '" + token + "' is not in the lexicon for its language"),
        token_(token) {}
  const std::string& token() const { return token_; }

 private:
  std::string token_;
};

// First-listed pronunciation of every word token, concatenated; punctuation
// is skipped and the language tag selects the dictionary. Throws OovError.
std::vector<SymbolId> phonemize(const GoldSentence& gold, const Lexicon& lex);

// Token index range [begin, end) covering between span_min_frac and
// span_max_frac of the gold's words (ceil on the lower bound, floor on the
// upper, at least one word), uniform start. Punctuation inside the range is
// part of the converted span; CS alternatives only.
struct SpanRange {
  int begin = 0;  // token index
  int end = 0;    // token index, exclusive
  int words = 0;  // word tokens covered
};
SpanRange sample_span(const GoldSentence& gold, const GenerationConfig& cfg, Rng& rng);

double heuristic_score(const Alternative& cand, const GoldSentence& gold,
                       const GenerationConfig& cfg);

// Rejection is an expected outcome of set building, not a failure.
struct Rejection {
  enum class Reason { kTooShort, kTooFewAlternatives, kOov };
  Reason reason;
  std::string detail;
};

using BuildOutcome = std::variant<EvalSet, Rejection>;

// Compiles the edit and decoding transducers for a lexicon once and runs
// the per-sentence pipeline. Immutable after construction; generate() and
// build_set() are pure given the RNG state, so sentences may be processed
// on any number of worker threads.
class Generator {
 public:
  Generator(const Lexicon& lex, const GenerationConfig& cfg);

  // Decoded candidates before rescoring: the nbest output mapped back to
  // tagged tokens with the unconverted remainder reattached, gold and
  // empty candidates dropped, deduplicated by surface keeping the
  // cheapest. Exposed for oracle testing.
  std::vector<Alternative> decode_candidates(const GoldSentence& gold, AltType type,
                                             Rng& rng) const;

  // Full per-type pipeline: decode, rescore, keep the top_k.
  std::vector<Alternative> generate(const GoldSentence& gold, AltType type, Rng& rng) const;

  // All three types plus the size checks; OOV golds come back as
  // Rejection{kOov}.
  BuildOutcome build_set(const GoldSentence& gold, const std::string& id, Rng& rng) const;

  const GenerationConfig& config() const { return cfg_; }
  const Lexicon& lexicon() const { return lex_; }

 private:
  const Lexicon& lex_;
  GenerationConfig cfg_;
  Wfst edit_;
  std::array<Wfst, 3> phone2word_;  // indexed by AltType
};

// Builds sets for a list of gold sentences, fanning out across `workers`
// threads. Each sentence gets an RNG seeded from (seed, its id), so the
// result is byte-identical for any worker count. Ids are prefix-NNNNNN.
std::vector<BuildOutcome> build_sets_parallel(const Generator& gen,
                                              const std::vector<GoldSentence>& golds,
                                              const std::string& id_prefix, uint64_t seed,
                                              int workers);

// Uniform sampling without replacement of cs_count CS-gold sets and
// mono_count mono-gold sets; DataError reporting the available counts when
// the pool is too small. Result preserves pool order.
std::vector<EvalSet> assemble_dataset(const std::vector<EvalSet>& pool, int cs_count,
                                      int mono_count, Rng& rng);

}  // namespace phonorank

#endif  // PHONORANK_SRC_ALTGEN_H_
