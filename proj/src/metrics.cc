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

#include "metrics.h"

#include <cmath>
#include <sstream>

#include "json.hpp"

namespace phonorank {

WerBreakdown wer(const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
  if (ref.empty()) throw DataError("wer: reference sequence is empty");
  size_t n = ref.size(), m = hyp.size();

  // dist[i][j] = edits aligning ref[0..i) with hyp[0..j).
  std::vector<std::vector<int>> dist(n + 1, std::vector<int>(m + 1, 0));
  for (size_t i = 0; i <= n; ++i) dist[i][0] = static_cast<int>(i);
  for (size_t j = 0; j <= m; ++j) dist[0][j] = static_cast<int>(j);
  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = 1; j <= m; ++j) {
      int sub = dist[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      int del = dist[i - 1][j] + 1;
      int ins = dist[i][j - 1] + 1;
      dist[i][j] = std::min(sub, std::min(del, ins));
    }
  }

  // Backtrace. On cost ties prefer substitution/match, then deletion, then
  // insertion, so the S/D/I split is deterministic.
  WerBreakdown out;
  out.ref_len = static_cast<int>(n);
  size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      int step = ref[i - 1] == hyp[j - 1] ? 0 : 1;
      if (dist[i][j] == dist[i - 1][j - 1] + step) {
        out.substitutions += step;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && dist[i][j] == dist[i - 1][j] + 1) {
      ++out.deletions;
      --i;
      continue;
    }
    ++out.insertions;
    --j;
  }
  out.wer = static_cast<double>(out.edits()) / static_cast<double>(out.ref_len);
  return out;
}

bool SetRanking::gold_won() const {
  for (double s : alt_scores)
    if (s >= gold_score) return false;
  return true;
}

int SetRanking::best_alt() const {
  int best = -1;
  for (size_t i = 0; i < alt_scores.size(); ++i)
    if (best < 0 || alt_scores[i] > alt_scores[static_cast<size_t>(best)])
      best = static_cast<int>(i);
  return best;
}

double accuracy(const std::vector<SetRanking>& results) {
  if (results.empty()) return 0.0;
  int won = 0;
  for (const auto& r : results) won += r.gold_won() ? 1 : 0;
  return 100.0 * static_cast<double>(won) / static_cast<double>(results.size());
}

namespace {

// Winner of a set: gold when strictly best, otherwise the best alternative.
WerBreakdown winner_wer(const SetRanking& r) {
  if (r.gold_won() || r.alt_scores.empty())
    return wer(r.gold_tokens, r.gold_tokens);
  return wer(r.gold_tokens, r.alt_tokens[static_cast<size_t>(r.best_alt())]);
}

}  // namespace

double corpus_wer_micro(const std::vector<SetRanking>& results) {
  int64_t edits = 0, ref_len = 0;
  for (const auto& r : results) {
    WerBreakdown b = winner_wer(r);
    edits += b.edits();
    ref_len += b.ref_len;
  }
  if (ref_len == 0) return 0.0;
  return 100.0 * static_cast<double>(edits) / static_cast<double>(ref_len);
}

double corpus_wer_macro(const std::vector<SetRanking>& results) {
  if (results.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : results) sum += winner_wer(r).wer;
  return 100.0 * sum / static_cast<double>(results.size());
}

void PerplexityAccumulator::add_prob(double p) {
  if (!(p > 0.0)) throw NumericError("perplexity: probability must be positive, got " + std::to_string(p));
  add_log2(std::log2(p));
}

void PerplexityAccumulator::merge(const PerplexityAccumulator& other) {
  sum_log2_ += other.sum_log2_;
  n_tokens_ += other.n_tokens_;
}

double PerplexityAccumulator::perplexity() const {
  if (n_tokens_ == 0) throw NumericError("perplexity: no tokens accumulated");
  return std::exp2(-sum_log2_ / static_cast<double>(n_tokens_));
}

EvalReport make_report(const std::vector<SetRanking>& results,
                       std::optional<double> perplexity) {
  EvalReport rep;
  rep.perplexity = perplexity;
  rep.num_sets = static_cast<int>(results.size());
  rep.accuracy = accuracy(results);
  rep.wer_micro = corpus_wer_micro(results);
  rep.wer_macro = corpus_wer_macro(results);

  std::vector<SetRanking> cs, mono;
  for (const auto& r : results) (r.gold_is_cs ? cs : mono).push_back(r);
  if (!cs.empty()) rep.accuracy_cs_gold = accuracy(cs);
  if (!mono.empty()) rep.accuracy_mono_gold = accuracy(mono);
  return rep;
}

std::string report_to_text(const EvalReport& report) {
  std::ostringstream ss;
  auto line = [&ss](const char* name, const std::optional<double>& v) {
    char buf[64];
    if (v.has_value())
      snprintf(buf, sizeof(buf), "%-18s %10.4f\n", name, *v);
    else
      snprintf(buf, sizeof(buf), "%-18s %10s\n", name, "--");
    ss << buf;
  };
  line("sets", static_cast<double>(report.num_sets));
  line("perplexity", report.perplexity);
  line("accuracy", report.accuracy);
  line("wer", report.wer_micro);
  line("wer_macro", report.wer_macro);
  line("accuracy_cs_gold", report.accuracy_cs_gold);
  line("accuracy_mono_gold", report.accuracy_mono_gold);
  return ss.str();
}

std::string report_to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["num_sets"] = report.num_sets;
  if (report.perplexity.has_value())
    j["perplexity"] = *report.perplexity;
  else
    j["perplexity"] = nullptr;
  j["accuracy"] = report.accuracy;
  j["wer"] = report.wer_micro;
  j["wer_macro"] = report.wer_macro;
  j["accuracy_cs_gold"] =
      report.accuracy_cs_gold.has_value() ? nlohmann::ordered_json(*report.accuracy_cs_gold) : nullptr;
  j["accuracy_mono_gold"] =
      report.accuracy_mono_gold.has_value() ? nlohmann::ordered_json(*report.accuracy_mono_gold) : nullptr;
  return j.dump(2) + "\n";
}

}  // namespace phonorank
