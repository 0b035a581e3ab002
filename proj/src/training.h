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

#ifndef PHONORANK_SRC_TRAINING_H_
#define PHONORANK_SRC_TRAINING_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "altgen.h"
#include "models.h"

namespace phonorank {

enum class Protocol : uint8_t {
  kL1OnlyLm,
  kL2OnlyLm,
  kAllShuffledLm,
  kAllCsLastLm,
  kCsOnlyLm,
  kFineTunedLm,
  kCsOnlyDisc,
  kFineTunedDisc,
};

Protocol parse_protocol(std::string_view name);
const char* protocol_name(Protocol p);
bool protocol_is_disc(Protocol p);

struct TrainConfig {
  double lr = 10.0;  // discriminative runs default to 1
  double lr_decay = 2.5;
  double lr_floor = 1e-4;  // training stops early once lr falls below
  double clip = 1.0;
  bool clip_by_value = false;
  double weight_decay = 1e-5;  // 0 for discriminative runs
  int batch_size = 20;
  int max_epochs = 40;
  uint64_t seed = 1;
};

// Per-set hinge: sum over alternatives of max(0, WER_i - (gold - score_i)).
// alts holds (score, wer) pairs.
double disc_loss(double gold_score, const std::vector<std::pair<double, double>>& alts);

// Learning-rate decay and best-checkpoint bookkeeping, separated out so
// synthetic metric sequences can drive it directly. The metric improves
// only when strictly better than the best seen so far; every
// non-improving epoch divides the rate by the decay factor.
class TrainSchedule {
 public:
  TrainSchedule(double lr, double decay_factor, double lr_floor, bool higher_is_better)
      : lr_(lr), decay_(decay_factor), floor_(lr_floor), higher_better_(higher_is_better) {}

  // Feed one epoch's dev metric; true when it is a new best.
  bool observe(double metric);

  double lr() const { return lr_; }
  bool exhausted() const { return lr_ < floor_; }
  int best_epoch() const { return best_epoch_; }  // 0-based, -1 before any epoch
  double best_metric() const { return best_metric_; }

 private:
  double lr_;
  double decay_;
  double floor_;
  bool higher_better_;
  int epoch_ = 0;
  int best_epoch_ = -1;
  double best_metric_ = 0.0;
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double lr = 0.0;
  double train_loss = 0.0;
  double dev_metric = 0.0;
  bool improved = false;
};

struct TrainResult {
  std::vector<EpochRecord> epochs;
  int best_epoch = -1;  // 1-based epoch whose parameters the model now holds
  double best_metric = 0.0;
  bool stopped_by_lr_floor = false;
  // Data-access audit: sentences (or sets) consumed per source name.
  std::map<std::string, int64_t> access_counts;
};

// --- generative training ------------------------------------------------------

struct LmDataSource {
  std::string name;  // audit label: "mono_l1", "mono_l2", "cs", ...
  std::vector<std::vector<int32_t>> sentences;
  bool is_cs = false;
};

enum class ArrangeMode {
  kShuffledUnion,  // all sources shuffled together each epoch
  kMonoThenCs,     // non-CS sources shuffled, then the CS source
};

// Cross-entropy training in fixed-size sentence batches with per-epoch dev
// perplexity, lr decay on non-improvement, and best-checkpoint retention
// (the model ends up holding the best epoch's parameters). Empty training
// data is a ConfigError.
TrainResult train_lm(LmModel& model, const std::vector<LmDataSource>& sources, ArrangeMode mode,
                     const std::vector<std::vector<int32_t>>& dev_sentences,
                     const TrainConfig& cfg);

// Perplexity of the model over the sentences (eval mode, end sentinel
// included in the token count).
double lm_perplexity(const LmModel& model, const std::vector<std::vector<int32_t>>& sentences);

// --- discriminative training --------------------------------------------------

// One training set, already encoded against the model vocabulary, with the
// per-alternative WERs pooled over all alternative types.
struct DiscSet {
  std::string source;  // audit label
  std::vector<int32_t> gold;
  std::vector<std::vector<int32_t>> alts;
  std::vector<double> wers;
  bool gold_is_cs = false;
};

// Encodes an EvalSet; returns nullopt (with a warning) when the gold or an
// alternative cannot be scored under the vocabulary.
std::optional<DiscSet> to_disc_set(const EvalSet& set, const Vocabulary& vocab,
                                   const std::string& source);

// Hinge training over sets in batches; dev ranking accuracy drives the
// schedule and best-checkpoint retention, as in train_lm.
TrainResult train_disc(RankerModel& model, const std::vector<DiscSet>& train_sets,
                       const std::vector<DiscSet>& dev_sets, const TrainConfig& cfg);

// Strict-win ranking accuracy of the model over the sets (eval mode).
double disc_accuracy(const RankerModel& model, const std::vector<DiscSet>& sets);

}  // namespace phonorank

#endif  // PHONORANK_SRC_TRAINING_H_
