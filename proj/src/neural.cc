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

#include "neural.h"

#include <algorithm>
#include <cmath>

namespace phonorank {

void init_uniform(Param& p, Rng& rng, double scale) {
  for (double& x : p.value.v) x = rng.double_in(-scale, scale);
}

LstmLayer::LstmLayer(const std::string& prefix, int in_dim, int hid_dim)
    : input_dim(in_dim),
      hidden_dim(hid_dim),
      wx(prefix + ".wx", 4 * hid_dim, in_dim),
      wh(prefix + ".wh", 4 * hid_dim, hid_dim),
      b(prefix + ".b", 4 * hid_dim, 1) {}

std::vector<Param*> LstmLayer::params() { return {&wx, &wh, &b}; }

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// y += W x
void matvec_add(const Mat& w, const double* x, double* y) {
  for (int r = 0; r < w.rows; ++r) {
    const double* row = &w.v[static_cast<size_t>(r) * w.cols];
    double acc = 0.0;
    for (int c = 0; c < w.cols; ++c) acc += row[c] * x[c];
    y[r] += acc;
  }
}

// dx += W^T dy
void matvec_t_add(const Mat& w, const double* dy, double* dx) {
  for (int r = 0; r < w.rows; ++r) {
    const double* row = &w.v[static_cast<size_t>(r) * w.cols];
    double g = dy[r];
    if (g == 0.0) continue;
    for (int c = 0; c < w.cols; ++c) dx[c] += row[c] * g;
  }
}

// dW += scale * dy x^T
void outer_add(Mat& dw, const double* dy, const double* x, double scale) {
  for (int r = 0; r < dw.rows; ++r) {
    double g = dy[r] * scale;
    if (g == 0.0) continue;
    double* row = &dw.v[static_cast<size_t>(r) * dw.cols];
    for (int c = 0; c < dw.cols; ++c) row[c] += g * x[c];
  }
}

}  // namespace

void lstm_forward(const LstmLayer& layer, const std::vector<std::vector<double>>& inputs,
                  const std::vector<double>& hh_mask, LstmTrace& trace) {
  int H = layer.hidden_dim;
  size_t T = inputs.size();
  trace.x = inputs;
  trace.hh_mask = hh_mask;
  trace.h_prev.assign(T, std::vector<double>(static_cast<size_t>(H), 0.0));
  trace.gates.assign(T, std::vector<double>(static_cast<size_t>(4 * H), 0.0));
  trace.c.assign(T, std::vector<double>(static_cast<size_t>(H), 0.0));
  trace.h.assign(T, std::vector<double>(static_cast<size_t>(H), 0.0));

  std::vector<double> h(static_cast<size_t>(H), 0.0), c(static_cast<size_t>(H), 0.0);
  for (size_t t = 0; t < T; ++t) {
    std::vector<double>& masked = trace.h_prev[t];
    for (int i = 0; i < H; ++i)
      masked[static_cast<size_t>(i)] =
          hh_mask.empty() ? h[static_cast<size_t>(i)]
                          : h[static_cast<size_t>(i)] * hh_mask[static_cast<size_t>(i)];

    std::vector<double>& z = trace.gates[t];
    for (int i = 0; i < 4 * H; ++i) z[static_cast<size_t>(i)] = layer.b.value.v[static_cast<size_t>(i)];
    matvec_add(layer.wx.value, inputs[t].data(), z.data());
    matvec_add(layer.wh.value, masked.data(), z.data());

    for (int i = 0; i < H; ++i) {
      double ig = sigmoid(z[static_cast<size_t>(i)]);
      double fg = sigmoid(z[static_cast<size_t>(H + i)]);
      double og = sigmoid(z[static_cast<size_t>(2 * H + i)]);
      double gg = std::tanh(z[static_cast<size_t>(3 * H + i)]);
      z[static_cast<size_t>(i)] = ig;
      z[static_cast<size_t>(H + i)] = fg;
      z[static_cast<size_t>(2 * H + i)] = og;
      z[static_cast<size_t>(3 * H + i)] = gg;
      c[static_cast<size_t>(i)] = fg * c[static_cast<size_t>(i)] + ig * gg;
      h[static_cast<size_t>(i)] = og * std::tanh(c[static_cast<size_t>(i)]);
    }
    trace.c[t] = c;
    trace.h[t] = h;
  }
}

std::vector<std::vector<double>> lstm_backward(LstmLayer& layer, const LstmTrace& trace,
                                               const std::vector<std::vector<double>>& d_h,
                                               double scale) {
  int H = layer.hidden_dim;
  size_t T = trace.x.size();
  std::vector<std::vector<double>> d_x(T, std::vector<double>(static_cast<size_t>(layer.input_dim), 0.0));
  std::vector<double> dh(static_cast<size_t>(H), 0.0), dc(static_cast<size_t>(H), 0.0);
  std::vector<double> dz(static_cast<size_t>(4 * H), 0.0);

  for (size_t t = T; t-- > 0;) {
    for (int i = 0; i < H; ++i) dh[static_cast<size_t>(i)] += d_h[t][static_cast<size_t>(i)];

    const std::vector<double>& z = trace.gates[t];
    const std::vector<double>& c = trace.c[t];
    const double* c_prev = t > 0 ? trace.c[t - 1].data() : nullptr;

    for (int i = 0; i < H; ++i) {
      double ig = z[static_cast<size_t>(i)];
      double fg = z[static_cast<size_t>(H + i)];
      double og = z[static_cast<size_t>(2 * H + i)];
      double gg = z[static_cast<size_t>(3 * H + i)];
      double tc = std::tanh(c[static_cast<size_t>(i)]);
      double dhi = dh[static_cast<size_t>(i)];
      double dci = dc[static_cast<size_t>(i)] + dhi * og * (1.0 - tc * tc);
      double cp = c_prev ? c_prev[i] : 0.0;

      double d_ig = dci * gg;
      double d_fg = dci * cp;
      double d_og = dhi * tc;
      double d_gg = dci * ig;

      dz[static_cast<size_t>(i)] = d_ig * ig * (1.0 - ig);
      dz[static_cast<size_t>(H + i)] = d_fg * fg * (1.0 - fg);
      dz[static_cast<size_t>(2 * H + i)] = d_og * og * (1.0 - og);
      dz[static_cast<size_t>(3 * H + i)] = d_gg * (1.0 - gg * gg);

      dc[static_cast<size_t>(i)] = dci * fg;  // flows to c_{t-1}
    }

    outer_add(layer.wx.grad, dz.data(), trace.x[t].data(), scale);
    outer_add(layer.wh.grad, dz.data(), trace.h_prev[t].data(), scale);
    for (int i = 0; i < 4 * H; ++i) layer.b.grad.v[static_cast<size_t>(i)] += dz[static_cast<size_t>(i)] * scale;

    matvec_t_add(layer.wx.value, dz.data(), d_x[t].data());

    std::fill(dh.begin(), dh.end(), 0.0);
    std::vector<double> dh_prev(static_cast<size_t>(H), 0.0);
    matvec_t_add(layer.wh.value, dz.data(), dh_prev.data());
    if (!trace.hh_mask.empty())
      for (int i = 0; i < H; ++i) dh_prev[static_cast<size_t>(i)] *= trace.hh_mask[static_cast<size_t>(i)];
    dh = std::move(dh_prev);
  }
  return d_x;
}

void affine(const Mat& w, const Mat& b, const std::vector<double>& x, std::vector<double>& y) {
  y.assign(static_cast<size_t>(w.rows), 0.0);
  for (int r = 0; r < w.rows; ++r) y[static_cast<size_t>(r)] = b.v[static_cast<size_t>(r)];
  matvec_add(w, x.data(), y.data());
}

double log_softmax(std::vector<double>& logits) {
  double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double v : logits) sum += std::exp(v - mx);
  double log_z = mx + std::log(sum);
  for (double& v : logits) v -= log_z;
  return log_z;
}

std::vector<double> sample_dropout_mask(int dim, double rate, Rng& rng) {
  std::vector<double> mask(static_cast<size_t>(dim), 1.0);
  if (rate <= 0.0) return mask;
  double keep = 1.0 - rate;
  for (double& m : mask) m = rng.bernoulli(rate) ? 0.0 : 1.0 / keep;
  return mask;
}

double grad_global_norm(const std::vector<Param*>& params) {
  double sq = 0.0;
  for (const Param* p : params) {
    for (int r = 0; r < p->grad.rows; ++r) {
      if (!p->row_is_trainable(r)) continue;
      const double* row = &p->grad.v[static_cast<size_t>(r) * p->grad.cols];
      for (int c = 0; c < p->grad.cols; ++c) sq += row[c] * row[c];
    }
  }
  return std::sqrt(sq);
}

void zero_grads(const std::vector<Param*>& params) {
  for (Param* p : params) p->grad.zero();
}

double sgd_step(const std::vector<Param*>& params, const SgdOptions& opts) {
  double norm = grad_global_norm(params);
  if (!std::isfinite(norm))
    throw NumericError("sgd_step: non-finite gradient norm, aborting the update");

  double norm_scale = 1.0;
  if (!opts.clip_by_value && opts.clip > 0.0 && norm > opts.clip) norm_scale = opts.clip / norm;

  for (Param* p : params) {
    for (int r = 0; r < p->value.rows; ++r) {
      if (!p->row_is_trainable(r)) continue;
      double* value = &p->value.v[static_cast<size_t>(r) * p->value.cols];
      double* grad = &p->grad.v[static_cast<size_t>(r) * p->grad.cols];
      for (int c = 0; c < p->value.cols; ++c) {
        double g = grad[c] * norm_scale;
        if (opts.clip_by_value && opts.clip > 0.0)
          g = std::clamp(g, -opts.clip, opts.clip);
        // Decoupled weight decay: not part of the clipped gradient.
        value[c] -= opts.lr * (g + opts.weight_decay * value[c]);
      }
    }
  }
  zero_grads(params);
  return norm;
}

}  // namespace phonorank
