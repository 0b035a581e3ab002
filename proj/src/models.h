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

#ifndef PHONORANK_SRC_MODELS_H_
#define PHONORANK_SRC_MODELS_H_

#include <map>
#include <string>
#include <vector>

#include "corpus.h"
#include "neural.h"

namespace phonorank {

struct ModelConfig {
  int emb_dim = 300;
  int hidden_dim = 650;
  double word_dropout = 0.2;  // input token replaced by the placeholder
  double dropout = 0.35;      // variational, on hidden-to-hidden inputs
};

enum class ReprKind : uint8_t { kBiLstm = 0, kBow = 1 };

const char* repr_kind_name(ReprKind k);
ReprKind parse_repr_kind(std::string_view s);

// Generative language model: embeddings, two stacked LSTM layers, softmax
// output. Frozen vocabulary rows (non-trainable tokens) never receive
// updates, on the embedding and the output projection alike.
class LmModel {
 public:
  LmModel(Vocabulary vocab, const ModelConfig& cfg, uint64_t init_seed);

  // Natural-log probability of each next token, positions 0..n where
  // position i conditions on tokens < i; the end sentinel is position n.
  // Train mode applies word dropout and variational dropout using rng;
  // eval mode (rng may be null) is deterministic.
  std::vector<double> logprobs(const std::vector<int32_t>& words, bool train_mode,
                               Rng* rng) const;

  // Full next-token probability rows (eval mode); rows sum to one.
  std::vector<std::vector<double>> distributions(const std::vector<int32_t>& words) const;

  // Sum of next-token log probabilities including the end sentinel; no
  // length normalization.
  double sentence_logprob(const std::vector<int32_t>& words) const;

  // Train-mode forward plus full backward of the summed cross-entropy (in
  // nats). Gradients accumulate scaled by `scale`. Returns {summed CE,
  // number of predicted positions}.
  std::pair<double, int> train_backward(const std::vector<int32_t>& words, double scale,
                                        Rng& rng);

  std::vector<Param*> params();
  std::vector<const Param*> params() const;
  const Vocabulary& vocab() const { return vocab_; }
  const ModelConfig& config() const { return cfg_; }

 private:
  friend LmModel lm_from_checkpoint(const struct Checkpoint& ckpt);

  struct Forward;
  void run_forward(const std::vector<int32_t>& words, bool train_mode, Rng* rng,
                   Forward& f) const;

  Vocabulary vocab_;
  ModelConfig cfg_;
  Param emb_;       // V x E
  LstmLayer lstm0_;
  LstmLayer lstm1_;
  Param out_w_;  // V x H
  Param out_b_;  // V x 1
};

// Discriminative sentence scorer: score(s) = w . repr(s), where repr is the
// concatenated final states of a forward and a backward LSTM, or the mean
// input embedding for the BOW diagnostic variant.
class RankerModel {
 public:
  RankerModel(Vocabulary vocab, const ModelConfig& cfg, ReprKind kind, uint64_t init_seed);

  struct Forward {
    std::vector<int32_t> input_ids;
    std::vector<std::vector<double>> emb;
    LstmTrace fwd;
    LstmTrace bwd;
    std::vector<double> repr;
    double score = 0.0;
  };

  // Empty sentences are a DataError.
  Forward forward(const std::vector<int32_t>& words, bool train_mode, Rng* rng) const;
  std::vector<double> repr(const std::vector<int32_t>& words) const;  // eval mode
  double score(const std::vector<int32_t>& words) const;              // eval mode

  // Accumulates d(score * d_score)/d(params), scaled by `scale`.
  void backward(const Forward& f, double d_score, double scale);

  std::vector<Param*> params();
  std::vector<const Param*> params() const;
  const Vocabulary& vocab() const { return vocab_; }
  const ModelConfig& config() const { return cfg_; }
  ReprKind kind() const { return kind_; }

 private:
  friend RankerModel ranker_from_checkpoint(const struct Checkpoint& ckpt);

  Vocabulary vocab_;
  ModelConfig cfg_;
  ReprKind kind_;
  Param emb_;  // V x E
  LstmLayer fwd_;
  LstmLayer bwd_;
  Param w_;  // 2H x 1, or E x 1 for BOW
};

// Checkpoint container: magic, format version, JSON header naming tensors
// (name, shape, offset) plus the vocabulary and model kind, then raw
// little-endian 64-bit floats.
struct Checkpoint {
  std::string model_kind;  // "lm" | "ranker_bilstm" | "ranker_bow"
  ModelConfig config;
  Vocabulary vocab;
  std::map<std::string, Mat> tensors;
};

void save_checkpoint(const std::string& path, const std::string& model_kind,
                     const ModelConfig& cfg, const Vocabulary& vocab,
                     const std::vector<const Param*>& params);
Checkpoint load_checkpoint(const std::string& path);

// Shape-validating constructors (DataError on any mismatch).
LmModel lm_from_checkpoint(const Checkpoint& ckpt);
RankerModel ranker_from_checkpoint(const Checkpoint& ckpt);

}  // namespace phonorank

#endif  // PHONORANK_SRC_MODELS_H_
