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

#ifndef PHONORANK_SRC_METRICS_H_
#define PHONORANK_SRC_METRICS_H_

#include <optional>
#include <string>
#include <vector>

#include "common.h"

namespace phonorank {

// Minimal-edit alignment counts against a reference. wer may exceed 1; it
// is 0 iff the sequences are identical.
struct WerBreakdown {
  int substitutions = 0;
  int deletions = 0;
  int insertions = 0;
  int ref_len = 0;
  double wer = 0.0;

  int edits() const { return substitutions + deletions + insertions; }
};

// Unit-cost Levenshtein alignment via dynamic programming. Ties are broken
// deterministically preferring substitution over deletion over insertion.
// The reference must be non-empty (DataError otherwise); punctuation is
// expected to be stripped by the caller.
WerBreakdown wer(const std::vector<std::string>& ref, const std::vector<std::string>& hyp);

// One evaluated set: the gold sentence's score, every sentence's score, and
// the data needed for WER of the winner.
struct SetRanking {
  double gold_score = 0.0;
  std::vector<double> alt_scores;        // alternatives only, gold excluded
  std::vector<std::string> gold_tokens;  // punctuation stripped
  std::vector<std::vector<std::string>> alt_tokens;
  bool gold_is_cs = false;

  // Gold wins only when its score is strictly above every alternative.
  bool gold_won() const;
  // Index into alt_scores of the best alternative, -1 when there are none.
  int best_alt() const;
};

// Percentage of sets whose gold sentence got the strictly highest score.
double accuracy(const std::vector<SetRanking>& results);

// Corpus-level WER of the top-ranked sentence per set against its gold.
// Micro: sum of edits over sum of reference lengths; macro: mean of
// per-set WER. Both in percent.
double corpus_wer_micro(const std::vector<SetRanking>& results);
double corpus_wer_macro(const std::vector<SetRanking>& results);

// Streaming perplexity over base-2 log probabilities, per the definition
// 2^(-1/N * sum log2 M(w_i)).
class PerplexityAccumulator {
 public:
  // p must be in (0, 1]; zero or negative probability is a NumericError.
  void add_prob(double p);
  void add_log2(double log2_p) { sum_log2_ += log2_p; ++n_tokens_; }
  void merge(const PerplexityAccumulator& other);

  int64_t tokens() const { return n_tokens_; }
  double perplexity() const;  // NumericError when no tokens seen

 private:
  double sum_log2_ = 0.0;
  int64_t n_tokens_ = 0;
};

// Table-shaped evaluation report. Perplexity is absent for discriminative
// models; the CS/mono breakdown entries are absent when a bucket is empty.
struct EvalReport {
  std::optional<double> perplexity;
  double accuracy = 0.0;
  double wer_micro = 0.0;
  double wer_macro = 0.0;
  std::optional<double> accuracy_cs_gold;
  std::optional<double> accuracy_mono_gold;
  int num_sets = 0;
};

EvalReport make_report(const std::vector<SetRanking>& results,
                       std::optional<double> perplexity);

std::string report_to_text(const EvalReport& report);
std::string report_to_json(const EvalReport& report);

}  // namespace phonorank

#endif  // PHONORANK_SRC_METRICS_H_
