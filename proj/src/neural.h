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

#ifndef PHONORANK_SRC_NEURAL_H_
#define PHONORANK_SRC_NEURAL_H_

#include <string>
#include <vector>

#include "common.h"

namespace phonorank {

// Row-major matrix of 64-bit reals. Vectors are matrices with one column
// elsewhere; plain std::vector<double> is used for activations.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> v;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), v(static_cast<size_t>(r) * static_cast<size_t>(c), 0.0) {}

  double& at(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }
  size_t size() const { return v.size(); }
  void zero() { std::fill(v.begin(), v.end(), 0.0); }
};

// Named parameter with a same-shaped gradient buffer. When row_trainable is
// non-empty, rows flagged false receive neither gradient updates nor weight
// decay (frozen vocabulary entries).
struct Param {
  std::string name;
  Mat value;
  Mat grad;
  std::vector<bool> row_trainable;

  Param() = default;
  Param(std::string n, int rows, int cols)
      : name(std::move(n)), value(rows, cols), grad(rows, cols) {}

  bool row_is_trainable(int r) const {
    return row_trainable.empty() || row_trainable[static_cast<size_t>(r)];
  }
};

// Uniform init in [-scale, scale], the shared policy for every parameter.
void init_uniform(Param& p, Rng& rng, double scale = 0.05);

// One LSTM layer with fused gate matrices; rows [0,H) input gate, [H,2H)
// forget, [2H,3H) output, [3H,4H) candidate.
struct LstmLayer {
  int input_dim = 0;
  int hidden_dim = 0;
  Param wx;  // 4H x I
  Param wh;  // 4H x H
  Param b;   // 4H x 1

  LstmLayer() = default;
  LstmLayer(const std::string& prefix, int input_dim, int hidden_dim);
  std::vector<Param*> params();
};

// Forward trace of one sequence through one layer, kept for backward.
struct LstmTrace {
  std::vector<std::vector<double>> x;         // inputs
  std::vector<std::vector<double>> h_prev;    // masked previous hidden
  std::vector<std::vector<double>> gates;     // post-activation i,f,o,g (4H)
  std::vector<std::vector<double>> c;         // cell states
  std::vector<std::vector<double>> h;         // hidden states
  std::vector<double> hh_mask;                // empty = no dropout
};

// Runs the layer over the sequence. hh_mask, when non-empty, multiplies the
// previous hidden state before the recurrent matrix (variational dropout:
// one mask for the whole sequence).
void lstm_forward(const LstmLayer& layer, const std::vector<std::vector<double>>& inputs,
                  const std::vector<double>& hh_mask, LstmTrace& trace);

// Reverse-mode pass. d_h holds dL/dh_t per step (zero vectors where the
// loss does not touch h_t). Accumulates parameter gradients scaled by
// `scale` and returns dL/dx_t.
std::vector<std::vector<double>> lstm_backward(LstmLayer& layer, const LstmTrace& trace,
                                               const std::vector<std::vector<double>>& d_h,
                                               double scale);

// y = W x + b as a log-softmax-ready logit vector.
void affine(const Mat& w, const Mat& b, const std::vector<double>& x, std::vector<double>& y);

// Stable log softmax in place; returns log of the partition function.
double log_softmax(std::vector<double>& logits);

// Dropout mask with inverted scaling: entries are 0 with probability rate,
// 1/(1-rate) otherwise.
std::vector<double> sample_dropout_mask(int dim, double rate, Rng& rng);

struct SgdOptions {
  double lr = 1.0;
  double clip = 1.0;             // global norm cap; <= 0 disables clipping
  bool clip_by_value = false;    // per-element clamp instead of norm scaling
  double weight_decay = 0.0;     // decoupled, applied outside the clip
};

// Clips, applies decoupled weight decay, updates, and zeroes the gradient
// buffers. Returns the pre-clip global gradient norm. Non-finite gradients
// abort the step with NumericError.
double sgd_step(const std::vector<Param*>& params, const SgdOptions& opts);

double grad_global_norm(const std::vector<Param*>& params);
void zero_grads(const std::vector<Param*>& params);

}  // namespace phonorank

#endif  // PHONORANK_SRC_NEURAL_H_
