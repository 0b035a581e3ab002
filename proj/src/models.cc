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

#include "models.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "json.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace phonorank {

const char* repr_kind_name(ReprKind k) {
  return k == ReprKind::kBiLstm ? "bilstm" : "bow";
}

ReprKind parse_repr_kind(std::string_view s) {
  if (s == "bilstm") return ReprKind::kBiLstm;
  if (s == "bow") return ReprKind::kBow;
  throw ConfigError("unknown representation kind '" + std::string(s) + "'");
}

namespace {

void check_ids(const std::vector<int32_t>& words, int32_t vocab_size) {
  for (int32_t id : words)
    if (id < 0 || id >= vocab_size)
      throw DataError("token id " + std::to_string(id) + " out of range (vocabulary size " +
                      std::to_string(vocab_size) + ")");
}

// Word dropout: each input token is replaced by the placeholder embedding
// with probability rate. Drawn before any mask sampling so the RNG stream
// layout is fixed.
std::vector<int32_t> apply_word_dropout(const std::vector<int32_t>& ids, double rate, Rng* rng) {
  std::vector<int32_t> out = ids;
  if (rate <= 0.0 || rng == nullptr) return out;
  for (int32_t& id : out)
    if (rng->bernoulli(rate)) id = Vocabulary::kDrop;
  return out;
}

void freeze_rows(Param& p, const std::vector<bool>& trainable) {
  p.row_trainable = trainable;
}

}  // namespace

// --- LmModel -----------------------------------------------------------------

LmModel::LmModel(Vocabulary vocab, const ModelConfig& cfg, uint64_t init_seed)
    : vocab_(std::move(vocab)),
      cfg_(cfg),
      emb_("emb", vocab_.size(), cfg.emb_dim),
      lstm0_("lstm0", cfg.emb_dim, cfg.hidden_dim),
      lstm1_("lstm1", cfg.hidden_dim, cfg.hidden_dim),
      out_w_("out.w", vocab_.size(), cfg.hidden_dim),
      out_b_("out.b", vocab_.size(), 1) {
  Rng rng(derive_seed(init_seed, "lm_init"));
  for (Param* p : params()) init_uniform(*p, rng);
  freeze_rows(emb_, vocab_.trainable_flags());
  freeze_rows(out_w_, vocab_.trainable_flags());
  freeze_rows(out_b_, vocab_.trainable_flags());
}

std::vector<Param*> LmModel::params() {
  std::vector<Param*> out{&emb_};
  for (Param* p : lstm0_.params()) out.push_back(p);
  for (Param* p : lstm1_.params()) out.push_back(p);
  out.push_back(&out_w_);
  out.push_back(&out_b_);
  return out;
}

std::vector<const Param*> LmModel::params() const {
  auto mutable_params = const_cast<LmModel*>(this)->params();
  return std::vector<const Param*>(mutable_params.begin(), mutable_params.end());
}

struct LmModel::Forward {
  std::vector<int32_t> inputs;   // BOS + words, after word dropout
  std::vector<int32_t> targets;  // words + EOS
  std::vector<std::vector<double>> emb;
  LstmTrace t0;
  LstmTrace t1;
  std::vector<std::vector<double>> log_rows;  // log softmax per position
};

void LmModel::run_forward(const std::vector<int32_t>& words, bool train_mode, Rng* rng,
                          Forward& f) const {
  check_ids(words, vocab_.size());

  f.inputs.clear();
  f.inputs.push_back(Vocabulary::kBos);
  f.inputs.insert(f.inputs.end(), words.begin(), words.end());
  f.targets = words;
  f.targets.push_back(Vocabulary::kEos);

  if (train_mode)
    f.inputs = apply_word_dropout(f.inputs, cfg_.word_dropout, rng);

  std::vector<double> mask0, mask1;
  if (train_mode && cfg_.dropout > 0.0 && rng != nullptr) {
    mask0 = sample_dropout_mask(cfg_.hidden_dim, cfg_.dropout, *rng);
    mask1 = sample_dropout_mask(cfg_.hidden_dim, cfg_.dropout, *rng);
  }

  f.emb.assign(f.inputs.size(), std::vector<double>(static_cast<size_t>(cfg_.emb_dim), 0.0));
  for (size_t t = 0; t < f.inputs.size(); ++t) {
    const double* row = &emb_.value.v[static_cast<size_t>(f.inputs[t]) * cfg_.emb_dim];
    std::copy(row, row + cfg_.emb_dim, f.emb[t].begin());
  }

  lstm_forward(lstm0_, f.emb, mask0, f.t0);
  lstm_forward(lstm1_, f.t0.h, mask1, f.t1);

  f.log_rows.assign(f.targets.size(), {});
  for (size_t t = 0; t < f.targets.size(); ++t) {
    affine(out_w_.value, out_b_.value, f.t1.h[t], f.log_rows[t]);
    log_softmax(f.log_rows[t]);
  }
}

std::vector<double> LmModel::logprobs(const std::vector<int32_t>& words, bool train_mode,
                                      Rng* rng) const {
  Forward f;
  run_forward(words, train_mode, rng, f);
  std::vector<double> out(f.targets.size(), 0.0);
  for (size_t t = 0; t < f.targets.size(); ++t)
    out[t] = f.log_rows[t][static_cast<size_t>(f.targets[t])];
  return out;
}

std::vector<std::vector<double>> LmModel::distributions(const std::vector<int32_t>& words) const {
  Forward f;
  run_forward(words, false, nullptr, f);
  for (auto& row : f.log_rows)
    for (double& v : row) v = std::exp(v);
  return f.log_rows;
}

double LmModel::sentence_logprob(const std::vector<int32_t>& words) const {
  double sum = 0.0;
  for (double lp : logprobs(words, false, nullptr)) sum += lp;
  return sum;
}

std::pair<double, int> LmModel::train_backward(const std::vector<int32_t>& words, double scale,
                                               Rng& rng) {
  Forward f;
  run_forward(words, true, &rng, f);
  size_t T = f.targets.size();

  double loss = 0.0;
  std::vector<std::vector<double>> d_h(T, std::vector<double>(static_cast<size_t>(cfg_.hidden_dim), 0.0));
  std::vector<double> d_logits;
  for (size_t t = 0; t < T; ++t) {
    int32_t target = f.targets[t];
    loss -= f.log_rows[t][static_cast<size_t>(target)];

    // d loss / d logits = softmax - onehot.
    d_logits = f.log_rows[t];
    for (double& v : d_logits) v = std::exp(v);
    d_logits[static_cast<size_t>(target)] -= 1.0;

    for (int r = 0; r < vocab_.size(); ++r) {
      double g = d_logits[static_cast<size_t>(r)] * scale;
      if (g == 0.0) continue;
      double* wrow = &out_w_.grad.v[static_cast<size_t>(r) * cfg_.hidden_dim];
      const double* h = f.t1.h[t].data();
      for (int c = 0; c < cfg_.hidden_dim; ++c) wrow[c] += g * h[c];
      out_b_.grad.v[static_cast<size_t>(r)] += g;
    }
    const double* w = out_w_.value.v.data();
    for (int r = 0; r < vocab_.size(); ++r) {
      double g = d_logits[static_cast<size_t>(r)];
      if (g == 0.0) continue;
      const double* wrow = w + static_cast<size_t>(r) * cfg_.hidden_dim;
      double* dh = d_h[t].data();
      for (int c = 0; c < cfg_.hidden_dim; ++c) dh[c] += wrow[c] * g;
    }
  }

  auto d_h1 = lstm_backward(lstm1_, f.t1, d_h, scale);
  auto d_emb = lstm_backward(lstm0_, f.t0, d_h1, scale);
  for (size_t t = 0; t < f.inputs.size(); ++t) {
    int32_t id = f.inputs[t];
    if (!emb_.row_is_trainable(id)) continue;
    double* row = &emb_.grad.v[static_cast<size_t>(id) * cfg_.emb_dim];
    for (int c = 0; c < cfg_.emb_dim; ++c) row[c] += d_emb[t][static_cast<size_t>(c)] * scale;
  }
  return {loss, static_cast<int>(T)};
}

// --- RankerModel -------------------------------------------------------------

RankerModel::RankerModel(Vocabulary vocab, const ModelConfig& cfg, ReprKind kind,
                         uint64_t init_seed)
    : vocab_(std::move(vocab)),
      cfg_(cfg),
      kind_(kind),
      emb_("emb", vocab_.size(), cfg.emb_dim),
      fwd_("fwd", cfg.emb_dim, cfg.hidden_dim),
      bwd_("bwd", cfg.emb_dim, cfg.hidden_dim),
      w_("score.w", kind == ReprKind::kBiLstm ? 2 * cfg.hidden_dim : cfg.emb_dim, 1) {
  Rng rng(derive_seed(init_seed, "ranker_init"));
  for (Param* p : params()) init_uniform(*p, rng);
  freeze_rows(emb_, vocab_.trainable_flags());
}

std::vector<Param*> RankerModel::params() {
  std::vector<Param*> out{&emb_};
  if (kind_ == ReprKind::kBiLstm) {
    for (Param* p : fwd_.params()) out.push_back(p);
    for (Param* p : bwd_.params()) out.push_back(p);
  }
  out.push_back(&w_);
  return out;
}

std::vector<const Param*> RankerModel::params() const {
  auto mutable_params = const_cast<RankerModel*>(this)->params();
  return std::vector<const Param*>(mutable_params.begin(), mutable_params.end());
}

RankerModel::Forward RankerModel::forward(const std::vector<int32_t>& words, bool train_mode,
                                          Rng* rng) const {
  if (words.empty()) throw DataError("ranker: cannot score an empty sentence");
  check_ids(words, vocab_.size());

  Forward f;
  f.input_ids = train_mode ? apply_word_dropout(words, cfg_.word_dropout, rng) : words;

  f.emb.assign(f.input_ids.size(), std::vector<double>(static_cast<size_t>(cfg_.emb_dim), 0.0));
  for (size_t t = 0; t < f.input_ids.size(); ++t) {
    const double* row = &emb_.value.v[static_cast<size_t>(f.input_ids[t]) * cfg_.emb_dim];
    std::copy(row, row + cfg_.emb_dim, f.emb[t].begin());
  }

  if (kind_ == ReprKind::kBow) {
    f.repr.assign(static_cast<size_t>(cfg_.emb_dim), 0.0);
    for (const auto& e : f.emb)
      for (int c = 0; c < cfg_.emb_dim; ++c) f.repr[static_cast<size_t>(c)] += e[static_cast<size_t>(c)];
    for (double& v : f.repr) v /= static_cast<double>(f.emb.size());
  } else {
    std::vector<double> mask_f, mask_b;
    if (train_mode && cfg_.dropout > 0.0 && rng != nullptr) {
      mask_f = sample_dropout_mask(cfg_.hidden_dim, cfg_.dropout, *rng);
      mask_b = sample_dropout_mask(cfg_.hidden_dim, cfg_.dropout, *rng);
    }
    lstm_forward(fwd_, f.emb, mask_f, f.fwd);
    std::vector<std::vector<double>> reversed(f.emb.rbegin(), f.emb.rend());
    lstm_forward(bwd_, reversed, mask_b, f.bwd);

    f.repr = f.fwd.h.back();
    f.repr.insert(f.repr.end(), f.bwd.h.back().begin(), f.bwd.h.back().end());
  }

  f.score = 0.0;
  for (size_t i = 0; i < f.repr.size(); ++i) f.score += w_.value.v[i] * f.repr[i];
  return f;
}

std::vector<double> RankerModel::repr(const std::vector<int32_t>& words) const {
  return forward(words, false, nullptr).repr;
}

double RankerModel::score(const std::vector<int32_t>& words) const {
  return forward(words, false, nullptr).score;
}

void RankerModel::backward(const Forward& f, double d_score, double scale) {
  for (size_t i = 0; i < f.repr.size(); ++i)
    w_.grad.v[i] += d_score * f.repr[i] * scale;

  std::vector<double> d_repr(f.repr.size());
  for (size_t i = 0; i < f.repr.size(); ++i) d_repr[i] = d_score * w_.value.v[i];

  // d_emb holds dL/d(input embedding row) per position, unscaled; the
  // parameter-side scaling happens inside lstm_backward and at the
  // accumulation below.
  std::vector<std::vector<double>> d_emb;
  if (kind_ == ReprKind::kBow) {
    double inv = 1.0 / static_cast<double>(f.emb.size());
    d_emb.assign(f.emb.size(), std::vector<double>(static_cast<size_t>(cfg_.emb_dim), 0.0));
    for (auto& de : d_emb)
      for (int c = 0; c < cfg_.emb_dim; ++c)
        de[static_cast<size_t>(c)] = d_repr[static_cast<size_t>(c)] * inv;
  } else {
    size_t T = f.emb.size();
    int H = cfg_.hidden_dim;
    std::vector<std::vector<double>> d_hf(T, std::vector<double>(static_cast<size_t>(H), 0.0));
    std::vector<std::vector<double>> d_hb(T, std::vector<double>(static_cast<size_t>(H), 0.0));
    for (int i = 0; i < H; ++i) {
      d_hf[T - 1][static_cast<size_t>(i)] = d_repr[static_cast<size_t>(i)];
      d_hb[T - 1][static_cast<size_t>(i)] = d_repr[static_cast<size_t>(H + i)];
    }
    d_emb = lstm_backward(fwd_, f.fwd, d_hf, scale);
    auto d_emb_b = lstm_backward(bwd_, f.bwd, d_hb, scale);
    for (size_t t = 0; t < T; ++t) {
      const auto& rev = d_emb_b[T - 1 - t];  // undo the input reversal
      for (int c = 0; c < cfg_.emb_dim; ++c)
        d_emb[t][static_cast<size_t>(c)] += rev[static_cast<size_t>(c)];
    }
  }

  for (size_t t = 0; t < f.emb.size(); ++t) {
    int32_t id = f.input_ids[t];
    if (!emb_.row_is_trainable(id)) continue;
    double* row = &emb_.grad.v[static_cast<size_t>(id) * cfg_.emb_dim];
    for (int c = 0; c < cfg_.emb_dim; ++c) row[c] += d_emb[t][static_cast<size_t>(c)] * scale;
  }
}

// --- checkpoints -------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'P', 'R', 'N', 'K', 'C', 'K', 'P', 'T'};
constexpr uint32_t kFormatVersion = 1;

}  // namespace

void save_checkpoint(const std::string& path, const std::string& model_kind,
                     const ModelConfig& cfg, const Vocabulary& vocab,
                     const std::vector<const Param*>& params) {
  nlohmann::ordered_json header;
  header["model_kind"] = model_kind;
  header["emb_dim"] = cfg.emb_dim;
  header["hidden_dim"] = cfg.hidden_dim;
  header["word_dropout"] = cfg.word_dropout;
  header["dropout"] = cfg.dropout;
  nlohmann::ordered_json vocab_json;
  vocab_json["tokens"] = vocab.tokens();
  std::vector<int> trainable;
  for (bool t : vocab.trainable_flags()) trainable.push_back(t ? 1 : 0);
  vocab_json["trainable"] = trainable;
  header["vocab"] = std::move(vocab_json);

  nlohmann::ordered_json tensors = nlohmann::ordered_json::array();
  uint64_t offset = 0;
  for (const Param* p : params) {
    tensors.push_back({{"name", p->name},
                       {"shape", {p->value.rows, p->value.cols}},
                       {"offset", offset}});
    offset += p->value.size();
  }
  header["tensors"] = std::move(tensors);
  std::string header_bytes = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  out.write(kMagic, sizeof(kMagic));
  uint32_t version = kFormatVersion;
  uint64_t header_len = header_bytes.size();
  out.write(reinterpret_cast<const char*>(&version), sizeof(version));
  out.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
  out.write(header_bytes.data(), static_cast<std::streamsize>(header_bytes.size()));
  for (const Param* p : params)
    out.write(reinterpret_cast<const char*>(p->value.v.data()),
              static_cast<std::streamsize>(p->value.size() * sizeof(double)));
  if (!out) throw DataError("short write on checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);

  char magic[8];
  uint32_t version = 0;
  uint64_t header_len = 0;
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw DataError("not a checkpoint file: " + path);
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (version != kFormatVersion)
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  in.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
  std::string header_bytes(header_len, '\0');
  in.read(header_bytes.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw DataError("truncated checkpoint header: " + path);

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_bytes);
  } catch (const std::exception& e) {
    throw DataError(std::string("bad checkpoint header: ") + e.what());
  }

  Checkpoint ckpt;
  ckpt.model_kind = header.at("model_kind").get<std::string>();
  ckpt.config.emb_dim = header.at("emb_dim").get<int>();
  ckpt.config.hidden_dim = header.at("hidden_dim").get<int>();
  ckpt.config.word_dropout = header.at("word_dropout").get<double>();
  ckpt.config.dropout = header.at("dropout").get<double>();

  const auto& tokens = header.at("vocab").at("tokens");
  const auto& trainable = header.at("vocab").at("trainable");
  if (tokens.size() != trainable.size() || tokens.size() < Vocabulary::kNumReserved)
    throw DataError("corrupt vocabulary in checkpoint: " + path);
  for (size_t i = Vocabulary::kNumReserved; i < tokens.size(); ++i)
    ckpt.vocab.add(tokens[i].get<std::string>(), trainable[i].get<int>() != 0);
  // Reserved entries are constructed implicitly; sanity-check their names.
  for (int i = 0; i < Vocabulary::kNumReserved; ++i)
    if (ckpt.vocab.token(i) != tokens[static_cast<size_t>(i)].get<std::string>())
      throw DataError("reserved token mismatch in checkpoint: " + path);

  for (const auto& t : header.at("tensors")) {
    std::string name = t.at("name").get<std::string>();
    int rows = t.at("shape")[0].get<int>();
    int cols = t.at("shape")[1].get<int>();
    uint64_t offset = t.at("offset").get<uint64_t>();
    Mat m(rows, cols);
    in.seekg(static_cast<std::streamoff>(sizeof(kMagic) + sizeof(uint32_t) + sizeof(uint64_t) +
                                         header_len + offset * sizeof(double)));
    in.read(reinterpret_cast<char*>(m.v.data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
    if (!in) throw DataError("truncated tensor '" + name + "' in checkpoint: " + path);
    ckpt.tensors.emplace(std::move(name), std::move(m));
  }
  return ckpt;
}

namespace {

void load_into(const Checkpoint& ckpt, std::vector<Param*> params, const std::string& path_hint) {
  for (Param* p : params) {
    auto it = ckpt.tensors.find(p->name);
    if (it == ckpt.tensors.end())
      throw DataError("checkpoint is missing tensor '" + p->name + "'" + path_hint);
    if (it->second.rows != p->value.rows || it->second.cols != p->value.cols)
      throw DataError("tensor '" + p->name + "' has shape " + std::to_string(it->second.rows) +
                      "x" + std::to_string(it->second.cols) + ", model expects " +
                      std::to_string(p->value.rows) + "x" + std::to_string(p->value.cols));
    p->value = it->second;
  }
}

}  // namespace

LmModel lm_from_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.model_kind != "lm")
    throw DataError("checkpoint holds a '" + ckpt.model_kind + "' model, expected 'lm'");
  LmModel model(ckpt.vocab, ckpt.config, /*init_seed=*/0);
  load_into(ckpt, model.params(), "");
  return model;
}

RankerModel ranker_from_checkpoint(const Checkpoint& ckpt) {
  ReprKind kind;
  if (ckpt.model_kind == "ranker_bilstm")
    kind = ReprKind::kBiLstm;
  else if (ckpt.model_kind == "ranker_bow")
    kind = ReprKind::kBow;
  else
    throw DataError("checkpoint holds a '" + ckpt.model_kind + "' model, expected a ranker");
  RankerModel model(ckpt.vocab, ckpt.config, kind, /*init_seed=*/0);
  load_into(ckpt, model.params(), "");
  return model;
}

}  // namespace phonorank
