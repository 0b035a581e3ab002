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

#include "altgen.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>

namespace phonorank {

const char* alt_type_name(AltType t) {
  switch (t) {
    case AltType::kCs: return "cs";
    case AltType::kL1: return "l1";
    case AltType::kL2: return "l2";
  }
  return "?";
}

AltType parse_alt_type(std::string_view s) {
  if (s == "cs") return AltType::kCs;
  if (s == "l1") return AltType::kL1;
  if (s == "l2") return AltType::kL2;
  throw DataError("unknown alternative type '" + std::string(s) + "'");
}

std::vector<std::string> Alternative::word_surfaces() const {
  std::vector<std::string> out;
  for (const auto& t : tokens)
    if (t.is_word()) out.push_back(t.surface);
  return out;
}

namespace {

std::vector<SymbolId> phonemize_range(const GoldSentence& gold, const Lexicon& lex, int begin,
                                      int end) {
  std::vector<SymbolId> out;
  for (int i = begin; i < end; ++i) {
    const TaggedToken& tok = gold.tokens[static_cast<size_t>(i)];
    if (!tok.is_word()) continue;
    const PronEntry* e = lex.entry(tok.surface, tok.lang);
    if (e == nullptr) throw OovError(tok.surface);
    // First-pronunciation policy keeps the encoding deterministic; every
    // pronunciation stays reachable on the decoding side.
    for (const std::string& ph : e->pronunciations[0]) {
      SymbolId id = lex.phoneme_symbols()->find(ph);
      if (id <= 0) throw DataError("phoneme '" + ph + "' missing from the inventory");
      out.push_back(id);
    }
  }
  return out;
}

// Minority language of the gold sentence: the one with strictly fewer word
// tokens; for a monolingual gold that is the absent language. No minority
// on an exact tie.
std::optional<Lang> minority_language(const GoldSentence& gold) {
  int l1 = 0, l2 = 0;
  for (const auto& t : gold.tokens) {
    if (t.lang == Lang::kL1) ++l1;
    if (t.lang == Lang::kL2) ++l2;
  }
  if (l1 == l2) return std::nullopt;
  return l1 < l2 ? Lang::kL1 : Lang::kL2;
}

struct WordRange {
  int begin = 0;
  int end = 0;
};

// Token index range covering all words (leading/trailing punctuation stays
// outside).
WordRange full_word_range(const GoldSentence& gold) {
  WordRange r;
  int n = static_cast<int>(gold.tokens.size());
  int first = -1, last = -1;
  for (int i = 0; i < n; ++i) {
    if (gold.tokens[static_cast<size_t>(i)].is_word()) {
      if (first < 0) first = i;
      last = i;
    }
  }
  r.begin = first < 0 ? 0 : first;
  r.end = last < 0 ? 0 : last + 1;
  return r;
}

}  // namespace

std::vector<SymbolId> phonemize(const GoldSentence& gold, const Lexicon& lex) {
  return phonemize_range(gold, lex, 0, static_cast<int>(gold.tokens.size()));
}

SpanRange sample_span(const GoldSentence& gold, const GenerationConfig& cfg, Rng& rng) {
  int words = gold.word_count();
  if (words < 1) throw DataError("sample_span: sentence has no words");
  // ceil on the lower bound, floor on the upper, guarding fp noise on
  // fractions like 0.3 * 10.
  int k_min = static_cast<int>(std::ceil(cfg.span_min_frac * words - 1e-9));
  int k_max = static_cast<int>(std::floor(cfg.span_max_frac * words + 1e-9));
  k_min = std::max(1, k_min);
  k_max = std::max(k_min, std::min(k_max, words));
  int k = static_cast<int>(rng.int_in(k_min, k_max));
  int start_word = static_cast<int>(rng.int_in(0, words - k));

  // Map word positions to token indices.
  std::vector<int> word_tokens;
  for (int i = 0; i < static_cast<int>(gold.tokens.size()); ++i)
    if (gold.tokens[static_cast<size_t>(i)].is_word()) word_tokens.push_back(i);

  SpanRange span;
  span.begin = word_tokens[static_cast<size_t>(start_word)];
  span.end = word_tokens[static_cast<size_t>(start_word + k - 1)] + 1;
  span.words = k;
  return span;
}

double heuristic_score(const Alternative& cand, const GoldSentence& gold,
                       const GenerationConfig& cfg) {
  double minority_fraction = 0.0;
  int cand_words = 0;
  double char_sum = 0.0;
  std::optional<Lang> minority = minority_language(gold);
  int minority_count = 0;
  for (const auto& t : cand.tokens) {
    if (!t.is_word()) continue;
    ++cand_words;
    char_sum += static_cast<double>(t.surface.size());
    if (minority.has_value() && t.lang == *minority) ++minority_count;
  }
  if (cand.alt_type == AltType::kCs && cand_words > 0 && minority.has_value())
    minority_fraction = static_cast<double>(minority_count) / cand_words;
  double mean_word_chars = cand_words > 0 ? char_sum / cand_words : 0.0;
  return -cfg.weight_cost * cand.gen_cost + cfg.weight_minority * minority_fraction +
         cfg.weight_word_len * mean_word_chars;
}

Generator::Generator(const Lexicon& lex, const GenerationConfig& cfg)
    : lex_(lex), cfg_(cfg), edit_(lex.build_edit_fst()) {
  phone2word_[static_cast<size_t>(AltType::kCs)] = lex.build_phone2word({Lang::kL1, Lang::kL2});
  phone2word_[static_cast<size_t>(AltType::kL1)] = lex.build_phone2word({Lang::kL1});
  phone2word_[static_cast<size_t>(AltType::kL2)] = lex.build_phone2word({Lang::kL2});
}

std::vector<Alternative> Generator::decode_candidates(const GoldSentence& gold, AltType type,
                                                      Rng& rng) const {
  WordRange range;
  if (type == AltType::kCs) {
    SpanRange span = sample_span(gold, cfg_, rng);
    range.begin = span.begin;
    range.end = span.end;
  } else {
    // Monolingual alternatives convert the whole sentence.
    range = full_word_range(gold);
  }

  std::vector<SymbolId> phones = phonemize_range(gold, lex_, range.begin, range.end);
  Wfst chain = linear_acceptor(phones, lex_.phoneme_symbols());
  Wfst lattice = compose(compose(chain, edit_), phone2word_[static_cast<size_t>(type)]);

  NBestOptions opts;
  opts.max_expansions = cfg_.max_expansions;
  std::vector<Path> paths = nbest(lattice, cfg_.nbest, opts);

  std::vector<TaggedToken> prefix(gold.tokens.begin(), gold.tokens.begin() + range.begin);
  std::vector<TaggedToken> suffix(gold.tokens.begin() + range.end, gold.tokens.end());
  std::vector<std::string> gold_surfaces;
  for (const auto& t : gold.tokens) gold_surfaces.push_back(t.surface);

  std::vector<Alternative> out;
  std::map<std::vector<std::string>, size_t> seen;  // surfaces -> index in out
  for (const Path& p : paths) {
    Alternative cand;
    cand.alt_type = type;
    cand.gen_cost = p.weight;
    cand.tokens = prefix;
    for (SymbolId sym : p.output) {
      const std::string& name = lex_.word_symbols()->name(sym);
      size_t slash = name.rfind('/');
      cand.tokens.push_back(
          TaggedToken{name.substr(0, slash), parse_lang_tag(name.substr(slash + 1))});
    }
    cand.tokens.insert(cand.tokens.end(), suffix.begin(), suffix.end());

    int words = 0;
    std::vector<std::string> surfaces;
    for (const auto& t : cand.tokens) {
      surfaces.push_back(t.surface);
      words += t.is_word() ? 1 : 0;
    }
    if (words == 0) continue;            // everything deleted
    if (surfaces == gold_surfaces) continue;  // candidate equals gold

    // Dedupe on surfaces ignoring tags; nbest order makes the first
    // occurrence the cheapest.
    if (seen.emplace(std::move(surfaces), out.size()).second) out.push_back(std::move(cand));
  }
  return out;
}

std::vector<Alternative> Generator::generate(const GoldSentence& gold, AltType type,
                                             Rng& rng) const {
  std::vector<Alternative> cands = decode_candidates(gold, type, rng);
  for (Alternative& c : cands) c.heur_score = heuristic_score(c, gold, cfg_);
  std::sort(cands.begin(), cands.end(), [](const Alternative& x, const Alternative& y) {
    if (x.heur_score != y.heur_score) return x.heur_score > y.heur_score;
    if (x.gen_cost != y.gen_cost) return x.gen_cost < y.gen_cost;
    return x.tokens < y.tokens;
  });
  if (cands.size() > static_cast<size_t>(cfg_.top_k))
    cands.resize(static_cast<size_t>(cfg_.top_k));
  return cands;
}

BuildOutcome Generator::build_set(const GoldSentence& gold, const std::string& id,
                                  Rng& rng) const {
  if (gold.word_count() < cfg_.min_words)
    return Rejection{Rejection::Reason::kTooShort,
                     "gold has " + std::to_string(gold.word_count()) + " words, need " +
                         std::to_string(cfg_.min_words)};

  EvalSet set;
  set.id = id;
  set.gold = gold;
  try {
    for (AltType type : {AltType::kCs, AltType::kL1, AltType::kL2})
      set.alts[static_cast<size_t>(type)] = generate(gold, type, rng);
  } catch (const OovError& e) {
    return Rejection{Rejection::Reason::kOov, e.token()};
  }

  if (cfg_.require_all_types) {
    for (AltType type : {AltType::kCs, AltType::kL1, AltType::kL2}) {
      size_t n = set.alts[static_cast<size_t>(type)].size();
      if (n < static_cast<size_t>(cfg_.min_alternatives))
        return Rejection{Rejection::Reason::kTooFewAlternatives,
                         std::string(alt_type_name(type)) + " has " + std::to_string(n) +
                             " alternatives, need " + std::to_string(cfg_.min_alternatives)};
    }
  } else if (set.total_alternatives() < static_cast<size_t>(cfg_.min_alternatives)) {
    return Rejection{Rejection::Reason::kTooFewAlternatives,
                     "set has " + std::to_string(set.total_alternatives()) +
                         " alternatives in total, need " +
                         std::to_string(cfg_.min_alternatives)};
  }
  return set;
}

std::vector<BuildOutcome> build_sets_parallel(const Generator& gen,
                                              const std::vector<GoldSentence>& golds,
                                              const std::string& id_prefix, uint64_t seed,
                                              int workers) {
  std::vector<BuildOutcome> results(golds.size(), Rejection{Rejection::Reason::kOov, "unset"});
  auto make_id = [&](size_t i) {
    char buf[32];
    snprintf(buf, sizeof(buf), "%s-%06zu", id_prefix.c_str(), i);
    return std::string(buf);
  };
  auto run_one = [&](size_t i) {
    std::string id = make_id(i);
    // Seeding by (run seed, set id) makes output independent of worker
    // count and scheduling.
    Rng rng(derive_seed(seed, id));
    results[i] = gen.build_set(golds[i], id, rng);
  };

  workers = std::max(1, workers);
  if (workers == 1 || golds.size() < 2) {
    for (size_t i = 0; i < golds.size(); ++i) run_one(i);
    return results;
  }

  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= golds.size()) return;
        run_one(i);
      }
    });
  }
  for (auto& t : pool) t.join();
  return results;
}

std::vector<EvalSet> assemble_dataset(const std::vector<EvalSet>& pool, int cs_count,
                                      int mono_count, Rng& rng) {
  std::vector<size_t> cs_idx, mono_idx;
  for (size_t i = 0; i < pool.size(); ++i)
    (pool[i].gold.kind() == SentenceKind::kCs ? cs_idx : mono_idx).push_back(i);

  if (static_cast<int>(cs_idx.size()) < cs_count ||
      static_cast<int>(mono_idx.size()) < mono_count)
    throw DataError("assemble_dataset: need " + std::to_string(cs_count) + " CS + " +
                    std::to_string(mono_count) + " mono sets, pool has " +
                    std::to_string(cs_idx.size()) + " CS + " + std::to_string(mono_idx.size()) +
                    " mono");

  rng.shuffle(cs_idx);
  rng.shuffle(mono_idx);
  std::vector<size_t> chosen(cs_idx.begin(), cs_idx.begin() + cs_count);
  chosen.insert(chosen.end(), mono_idx.begin(), mono_idx.begin() + mono_count);
  std::sort(chosen.begin(), chosen.end());  // keep pool order

  std::vector<EvalSet> out;
  out.reserve(chosen.size());
  for (size_t i : chosen) out.push_back(pool[i]);
  return out;
}

}  // namespace phonorank
