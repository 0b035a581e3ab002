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

#include "training.h"

#include <algorithm>
#include <cmath>

#include "metrics.h"

namespace phonorank {

Protocol parse_protocol(std::string_view name) {
  if (name == "l1_only_lm") return Protocol::kL1OnlyLm;
  if (name == "l2_only_lm") return Protocol::kL2OnlyLm;
  if (name == "all_shuffled_lm") return Protocol::kAllShuffledLm;
  if (name == "all_cs_last_lm") return Protocol::kAllCsLastLm;
  if (name == "cs_only_lm") return Protocol::kCsOnlyLm;
  if (name == "fine_tuned_lm") return Protocol::kFineTunedLm;
  if (name == "cs_only_disc") return Protocol::kCsOnlyDisc;
  if (name == "fine_tuned_disc") return Protocol::kFineTunedDisc;
  throw ConfigError("unknown protocol '" + std::string(name) + "'");
}

const char* protocol_name(Protocol p) {
  switch (p) {
    case Protocol::kL1OnlyLm: return "l1_only_lm";
    case Protocol::kL2OnlyLm: return "l2_only_lm";
    case Protocol::kAllShuffledLm: return "all_shuffled_lm";
    case Protocol::kAllCsLastLm: return "all_cs_last_lm";
    case Protocol::kCsOnlyLm: return "cs_only_lm";
    case Protocol::kFineTunedLm: return "fine_tuned_lm";
    case Protocol::kCsOnlyDisc: return "cs_only_disc";
    case Protocol::kFineTunedDisc: return "fine_tuned_disc";
  }
  return "?";
}

bool protocol_is_disc(Protocol p) {
  return p == Protocol::kCsOnlyDisc || p == Protocol::kFineTunedDisc;
}

double disc_loss(double gold_score, const std::vector<std::pair<double, double>>& alts) {
  double loss = 0.0;
  for (const auto& [score, wer] : alts) loss += std::max(0.0, wer - (gold_score - score));
  return loss;
}

bool TrainSchedule::observe(double metric) {
  bool better = best_epoch_ < 0 ||
                (higher_better_ ? metric > best_metric_ : metric < best_metric_);
  if (better) {
    best_metric_ = metric;
    best_epoch_ = epoch_;
  } else {
    lr_ /= decay_;
  }
  ++epoch_;
  return better;
}

namespace {

std::vector<Mat> snapshot_params(const std::vector<Param*>& params) {
  std::vector<Mat> out;
  out.reserve(params.size());
  for (const Param* p : params) out.push_back(p->value);
  return out;
}

void restore_params(const std::vector<Param*>& params, const std::vector<Mat>& snapshot) {
  for (size_t i = 0; i < params.size(); ++i) params[i]->value = snapshot[i];
}

}  // namespace

double lm_perplexity(const LmModel& model, const std::vector<std::vector<int32_t>>& sentences) {
  PerplexityAccumulator acc;
  constexpr double kLn2 = 0.6931471805599453;
  for (const auto& sent : sentences)
    for (double lp : model.logprobs(sent, /*train_mode=*/false, nullptr))
      acc.add_log2(lp / kLn2);
  return acc.perplexity();
}

TrainResult train_lm(LmModel& model, const std::vector<LmDataSource>& sources, ArrangeMode mode,
                     const std::vector<std::vector<int32_t>>& dev_sentences,
                     const TrainConfig& cfg) {
  size_t total = 0;
  for (const auto& s : sources) total += s.sentences.size();
  if (total == 0) throw ConfigError("train_lm: no training sentences");
  if (dev_sentences.empty()) throw ConfigError("train_lm: no dev sentences");

  TrainResult result;
  TrainSchedule schedule(cfg.lr, cfg.lr_decay, cfg.lr_floor, /*higher_is_better=*/false);
  std::vector<Param*> params = model.params();
  std::vector<Mat> best = snapshot_params(params);
  int best_epoch = -1;

  using Ref = std::pair<size_t, size_t>;  // (source, sentence)
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    // Arrangement is reshuffled every epoch from an epoch-derived seed.
    Rng order_rng(derive_seed(cfg.seed, "lm_epoch_" + std::to_string(epoch)));
    std::vector<Ref> order;
    if (mode == ArrangeMode::kShuffledUnion) {
      for (size_t s = 0; s < sources.size(); ++s)
        for (size_t i = 0; i < sources[s].sentences.size(); ++i) order.emplace_back(s, i);
      order_rng.shuffle(order);
    } else {
      std::vector<Ref> mono, cs;
      for (size_t s = 0; s < sources.size(); ++s)
        for (size_t i = 0; i < sources[s].sentences.size(); ++i)
          (sources[s].is_cs ? cs : mono).emplace_back(s, i);
      order_rng.shuffle(mono);
      order_rng.shuffle(cs);
      order = std::move(mono);
      order.insert(order.end(), cs.begin(), cs.end());
    }

    Rng train_rng(derive_seed(cfg.seed, "lm_dropout_" + std::to_string(epoch)));
    double epoch_loss = 0.0;
    int64_t epoch_tokens = 0;
    for (size_t at = 0; at < order.size(); at += static_cast<size_t>(cfg.batch_size)) {
      size_t batch_end = std::min(order.size(), at + static_cast<size_t>(cfg.batch_size));
      int64_t batch_tokens = 0;
      for (size_t k = at; k < batch_end; ++k)
        batch_tokens +=
            static_cast<int64_t>(sources[order[k].first].sentences[order[k].second].size()) + 1;
      double scale = 1.0 / static_cast<double>(batch_tokens);
      for (size_t k = at; k < batch_end; ++k) {
        const auto& sent = sources[order[k].first].sentences[order[k].second];
        auto [loss, tokens] = model.train_backward(sent, scale, train_rng);
        epoch_loss += loss;
        epoch_tokens += tokens;
        ++result.access_counts[sources[order[k].first].name];
      }
      SgdOptions opts{schedule.lr(), cfg.clip, cfg.clip_by_value, cfg.weight_decay};
      sgd_step(params, opts);
    }

    double dev_ppl = lm_perplexity(model, dev_sentences);
    double lr_used = schedule.lr();
    bool improved = schedule.observe(dev_ppl);
    if (improved) {
      best = snapshot_params(params);
      best_epoch = epoch;
    }
    result.epochs.push_back(EpochRecord{epoch, lr_used,
                                        epoch_loss / static_cast<double>(epoch_tokens), dev_ppl,
                                        improved});
    log_info("lm epoch %d: lr %.4g, train loss %.4f, dev perplexity %.4f%s", epoch, lr_used,
             epoch_loss / static_cast<double>(epoch_tokens), dev_ppl, improved ? " *" : "");
    if (schedule.exhausted()) {
      result.stopped_by_lr_floor = true;
      break;
    }
  }

  restore_params(params, best);
  result.best_epoch = best_epoch;
  result.best_metric = schedule.best_metric();
  return result;
}

std::optional<DiscSet> to_disc_set(const EvalSet& set, const Vocabulary& vocab,
                                   const std::string& source) {
  DiscSet out;
  out.source = source;
  out.gold_is_cs = set.gold.kind() == SentenceKind::kCs;
  std::vector<std::string> gold_words = set.gold.word_surfaces();
  if (gold_words.empty()) {
    log_warn("set %s: gold has no words, skipped", set.id.c_str());
    return std::nullopt;
  }
  try {
    out.gold = vocab.encode(set.gold);
    for (AltType type : {AltType::kCs, AltType::kL1, AltType::kL2}) {
      for (const Alternative& alt : set.alts_for(type)) {
        std::vector<int32_t> ids;
        std::vector<std::string> words;
        for (const auto& tok : alt.tokens) {
          if (!tok.is_word()) continue;
          ids.push_back(vocab.require(tok.surface));
          words.push_back(tok.surface);
        }
        if (ids.empty()) continue;
        out.alts.push_back(std::move(ids));
        out.wers.push_back(wer(gold_words, words).wer);
      }
    }
  } catch (const DataError& e) {
    log_warn("set %s cannot be scored, skipped: %s", set.id.c_str(), e.what());
    return std::nullopt;
  }
  if (out.alts.empty()) {
    log_warn("set %s has no scorable alternatives, skipped", set.id.c_str());
    return std::nullopt;
  }
  return out;
}

double disc_accuracy(const RankerModel& model, const std::vector<DiscSet>& sets) {
  std::vector<SetRanking> rankings;
  rankings.reserve(sets.size());
  for (const DiscSet& s : sets) {
    SetRanking r;
    r.gold_score = model.score(s.gold);
    for (const auto& alt : s.alts) r.alt_scores.push_back(model.score(alt));
    r.gold_tokens = {"x"};  // accuracy needs scores only
    r.alt_tokens.assign(s.alts.size(), {"y"});
    r.gold_is_cs = s.gold_is_cs;
    rankings.push_back(std::move(r));
  }
  return accuracy(rankings);
}

TrainResult train_disc(RankerModel& model, const std::vector<DiscSet>& train_sets,
                       const std::vector<DiscSet>& dev_sets, const TrainConfig& cfg) {
  if (train_sets.empty()) throw ConfigError("train_disc: no training sets");
  if (dev_sets.empty()) throw ConfigError("train_disc: no dev sets");

  TrainResult result;
  TrainSchedule schedule(cfg.lr, cfg.lr_decay, cfg.lr_floor, /*higher_is_better=*/true);
  std::vector<Param*> params = model.params();
  std::vector<Mat> best = snapshot_params(params);
  int best_epoch = -1;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    Rng order_rng(derive_seed(cfg.seed, "disc_epoch_" + std::to_string(epoch)));
    std::vector<size_t> order(train_sets.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    order_rng.shuffle(order);

    Rng train_rng(derive_seed(cfg.seed, "disc_dropout_" + std::to_string(epoch)));
    double epoch_loss = 0.0;
    for (size_t at = 0; at < order.size(); at += static_cast<size_t>(cfg.batch_size)) {
      size_t batch_end = std::min(order.size(), at + static_cast<size_t>(cfg.batch_size));
      double scale = 1.0 / static_cast<double>(batch_end - at);
      for (size_t k = at; k < batch_end; ++k) {
        const DiscSet& set = train_sets[order[k]];
        ++result.access_counts[set.source];

        RankerModel::Forward gold_f = model.forward(set.gold, /*train_mode=*/true, &train_rng);
        std::vector<RankerModel::Forward> alt_f;
        alt_f.reserve(set.alts.size());
        for (const auto& alt : set.alts)
          alt_f.push_back(model.forward(alt, /*train_mode=*/true, &train_rng));

        // Subgradient: every violated margin pushes its alternative up by
        // one and the gold down by one.
        int violated = 0;
        for (size_t i = 0; i < alt_f.size(); ++i) {
          double margin = set.wers[i] - (gold_f.score - alt_f[i].score);
          if (margin > 0.0) {
            epoch_loss += margin;
            ++violated;
            model.backward(alt_f[i], 1.0, scale);
          }
        }
        if (violated > 0) model.backward(gold_f, -static_cast<double>(violated), scale);
      }
      SgdOptions opts{schedule.lr(), cfg.clip, cfg.clip_by_value, cfg.weight_decay};
      sgd_step(params, opts);
    }

    double dev_acc = disc_accuracy(model, dev_sets);
    double lr_used = schedule.lr();
    bool improved = schedule.observe(dev_acc);
    if (improved) {
      best = snapshot_params(params);
      best_epoch = epoch;
    }
    result.epochs.push_back(EpochRecord{epoch, lr_used,
                                        epoch_loss / static_cast<double>(train_sets.size()),
                                        dev_acc, improved});
    log_info("disc epoch %d: lr %.4g, train loss %.4f, dev accuracy %.2f%s", epoch, lr_used,
             epoch_loss / static_cast<double>(train_sets.size()), dev_acc, improved ? " *" : "");
    if (schedule.exhausted()) {
      result.stopped_by_lr_floor = true;
      break;
    }
  }

  restore_params(params, best);
  result.best_epoch = best_epoch;
  result.best_metric = schedule.best_metric();
  return result;
}

}  // namespace phonorank
