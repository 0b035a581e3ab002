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

#include "lexicon.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace phonorank {

namespace {

// CAT(2) -> CAT; returns false when there is no variant marker.
bool strip_variant_marker(std::string& word) {
  if (word.size() < 4 || word.back() != ')') return false;
  size_t open = word.rfind('(');
  if (open == std::string::npos || open == 0 || open + 2 > word.size() - 1) return false;
  for (size_t i = open + 1; i + 1 < word.size(); ++i)
    if (!isdigit(static_cast<unsigned char>(word[i]))) return false;
  word.resize(open);
  return true;
}

std::string strip_stress(const std::string& phoneme) {
  size_t end = phoneme.size();
  while (end > 0 && isdigit(static_cast<unsigned char>(phoneme[end - 1]))) --end;
  return phoneme.substr(0, end);
}

}  // namespace

LexiconFragment load_pron_dict(std::istream& in, Lang language, const std::string& source_id) {
  LexiconFragment frag;
  frag.language = language;
  std::map<std::string, size_t> index;
  std::string line;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = trim(line);
    if (body.empty() || starts_with(body, ";;;")) continue;
    auto fields = split_ws(body);
    if (fields.size() < 2)
      throw DataError(source_id + ":" + std::to_string(line_no) +
                      ": expected 'WORD PH1 PH2 ...', got '" + std::string(body) + "'");
    std::string word = fields[0];
    strip_variant_marker(word);
    word = lower_ascii(word);
    if (word.empty())
      throw DataError(source_id + ":" + std::to_string(line_no) + ": empty word");

    Pronunciation pron;
    for (size_t i = 1; i < fields.size(); ++i) {
      std::string ph = strip_stress(fields[i]);
      if (ph.empty())
        throw DataError(source_id + ":" + std::to_string(line_no) + ": bad phoneme '" +
                        fields[i] + "'");
      pron.push_back(std::move(ph));
    }

    auto it = index.find(word);
    if (it == index.end()) {
      index.emplace(word, frag.entries.size());
      frag.entries.push_back(PronEntry{word, language, {std::move(pron)}});
    } else {
      auto& prons = frag.entries[it->second].pronunciations;
      if (std::find(prons.begin(), prons.end(), pron) == prons.end())
        prons.push_back(std::move(pron));
    }
  }
  return frag;
}

std::string save_pron_dict(const LexiconFragment& fragment) {
  std::ostringstream out;
  for (const PronEntry& e : fragment.entries) {
    for (size_t v = 0; v < e.pronunciations.size(); ++v) {
      out << e.word;
      if (v > 0) out << '(' << v + 1 << ')';
      out << ' ';
      for (const std::string& ph : e.pronunciations[v]) out << ' ' << ph;
      out << '\n';
    }
  }
  return out.str();
}

PhonemeMap load_phoneme_map(std::istream& in, const std::string& source_id) {
  PhonemeMap map;
  std::string line;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = trim(line);
    if (body.empty() || body[0] == '#') continue;
    auto fields = split_ws(body);
    if (fields.size() < 2)
      throw DataError(source_id + ":" + std::to_string(line_no) +
                      ": expected 'SRC TGT1 [TGT2 ...]'");
    Pronunciation target(fields.begin() + 1, fields.end());
    map.targets[fields[0]].push_back(std::move(target));
  }
  return map;
}

std::vector<std::pair<std::string, std::string>> load_similar_pairs(std::istream& in,
                                                                    const std::string& source_id) {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = trim(line);
    if (body.empty() || body[0] == '#') continue;
    auto fields = split_ws(body);
    if (fields.size() != 2)
      throw DataError(source_id + ":" + std::to_string(line_no) + ": expected 'PH1 PH2'");
    pairs.emplace_back(fields[0], fields[1]);
  }
  return pairs;
}

LexiconFragment apply_phoneme_map(const LexiconFragment& fragment, const PhonemeMap& map) {
  LexiconFragment out;
  out.language = fragment.language;
  for (const PronEntry& e : fragment.entries) {
    PronEntry mapped{e.word, e.language, {}};
    for (const Pronunciation& pron : e.pronunciations) {
      // Cross-product over per-position alternatives.
      std::vector<Pronunciation> results{{}};
      for (const std::string& ph : pron) {
        auto it = map.targets.find(ph);
        if (it == map.targets.end())
          throw DataError("phoneme '" + ph + "' of word '" + e.word + "' has no mapping");
        std::vector<Pronunciation> next;
        for (const Pronunciation& prefix : results) {
          for (const Pronunciation& alt : it->second) {
            Pronunciation joined = prefix;
            joined.insert(joined.end(), alt.begin(), alt.end());
            next.push_back(std::move(joined));
          }
        }
        results = std::move(next);
      }
      for (Pronunciation& r : results) {
        if (std::find(mapped.pronunciations.begin(), mapped.pronunciations.end(), r) ==
            mapped.pronunciations.end())
          mapped.pronunciations.push_back(std::move(r));
      }
    }
    out.entries.push_back(std::move(mapped));
  }
  return out;
}

std::map<std::string, double> load_unigrams(std::istream& in, const std::string& source_id) {
  std::map<std::string, double> values;
  std::string line;
  int64_t line_no = 0;
  double sum = 0.0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = trim(line);
    if (body.empty() || body[0] == '#') continue;
    auto fields = split_ws(body);
    if (fields.size() != 2)
      throw DataError(source_id + ":" + std::to_string(line_no) + ": expected 'word value'");
    char* end = nullptr;
    double v = strtod(fields[1].c_str(), &end);
    if (end == fields[1].c_str() || *end != '\0' || !(v > 0.0))
      throw DataError(source_id + ":" + std::to_string(line_no) + ": bad positive value '" +
                      fields[1] + "'");
    values[lower_ascii(fields[0])] = v;
    sum += v;
  }
  // A column summing near one is already a probability table; otherwise
  // treat the values as counts.
  if (std::abs(sum - 1.0) > 0.05 && sum > 0.0)
    for (auto& [word, v] : values) v /= sum;
  for (auto& [word, v] : values) v = std::min(v, 1.0);
  return values;
}

bool default_filtered_word(const std::string& word) {
  if (word.size() != 1) return false;
  static const std::string kKept = "aiyoeu";
  return kKept.find(word[0]) == std::string::npos;
}

Lexicon::Lexicon(std::vector<LexiconFragment> fragments,
                 std::map<std::string, double> unigrams_l1,
                 std::map<std::string, double> unigrams_l2, const LexiconOptions& opts)
    : opts_(opts) {
  unigrams_[0] = std::move(unigrams_l1);
  unigrams_[1] = std::move(unigrams_l2);

  auto phones = std::make_shared<SymbolTable>();
  auto words = std::make_shared<SymbolTable>();
  for (LexiconFragment& frag : fragments) {
    for (PronEntry& e : frag.entries) {
      if (e.pronunciations.empty())
        throw DataError("word '" + e.word + "' has no pronunciation");
      auto key = std::make_pair(e.word, frag.language);
      e.language = frag.language;
      auto [it, inserted] = by_key_.emplace(key, e);
      if (inserted) {
        key_order_.push_back(key);
        words->add(e.word + "/" + lang_tag(frag.language));
      } else {
        for (const Pronunciation& p : e.pronunciations) {
          auto& prons = it->second.pronunciations;
          if (std::find(prons.begin(), prons.end(), p) == prons.end()) prons.push_back(p);
        }
      }
      for (const Pronunciation& p : e.pronunciations)
        for (const std::string& ph : p) phones->add(ph);
    }
  }
  phones_ = std::move(phones);
  words_ = std::move(words);

  if (opts_.filter_words.has_value()) {
    filters_ = *opts_.filter_words;
  } else {
    for (const auto& key : key_order_)
      if (default_filtered_word(key.first)) filters_.insert(key.first);
  }
}

const PronEntry* Lexicon::entry(const std::string& word, Lang lang) const {
  auto it = by_key_.find({word, lang});
  return it == by_key_.end() ? nullptr : &it->second;
}

double Lexicon::unigram_prob(const std::string& word, Lang lang) const {
  const auto& table = unigrams_[lang == Lang::kL2 ? 1 : 0];
  auto it = table.find(word);
  return it == table.end() ? opts_.unigram_floor : it->second;
}

Wfst Lexicon::build_word2phone(const std::set<Lang>& languages) const {
  Wfst m(words_, phones_);
  StateId root = m.add_state();
  m.set_start(root);
  m.set_final(root, 0.0);
  for (const auto& key : key_order_) {
    if (!languages.count(key.second)) continue;
    const PronEntry& e = by_key_.at(key);
    SymbolId word_sym = words_->find(e.word + "/" + lang_tag(e.language));
    for (const Pronunciation& pron : e.pronunciations) {
      StateId s = root;
      for (size_t i = 0; i < pron.size(); ++i) {
        SymbolId ph = phones_->find(pron[i]);
        StateId t = i + 1 == pron.size() ? root : m.add_state();
        m.add_arc(s, i == 0 ? word_sym : kEpsilon, ph, 0.0, t);
        s = t;
      }
    }
  }
  return m;
}

Wfst Lexicon::build_phone2word(const std::set<Lang>& languages, double unigram_scale) const {
  Wfst m(phones_, words_);
  StateId root = m.add_state();
  m.set_start(root);
  m.set_final(root, 0.0);

  // Phoneme trie with shared prefixes; a completed word loops back to the
  // root over an epsilon arc carrying the word label and its unigram cost.
  std::map<std::pair<StateId, SymbolId>, StateId> trie;
  for (const auto& key : key_order_) {
    if (!languages.count(key.second)) continue;
    const PronEntry& e = by_key_.at(key);
    if (filtered(e.word)) continue;
    SymbolId word_sym = words_->find(e.word + "/" + lang_tag(e.language));
    double cost = unigram_scale * -std::log(unigram_prob(e.word, e.language));
    for (const Pronunciation& pron : e.pronunciations) {
      StateId s = root;
      for (const std::string& phoneme : pron) {
        SymbolId ph = phones_->find(phoneme);
        auto [it, inserted] = trie.emplace(std::make_pair(s, ph), kNoState);
        if (inserted) {
          StateId t = m.add_state();
          it->second = t;
          m.add_arc(s, ph, kEpsilon, 0.0, t);
        }
        s = it->second;
      }
      m.add_arc(s, kEpsilon, word_sym, cost, root);
    }
  }
  return m;
}

Wfst Lexicon::build_edit_fst(const SimilarPhonemes& sim) const {
  Wfst m(phones_, phones_);
  StateId s = m.add_state();
  m.set_start(s);
  m.set_final(s, 0.0);

  for (SymbolId ph = 1; ph < static_cast<SymbolId>(phones_->size()); ++ph) {
    m.add_arc(s, ph, ph, 0.0, s);
    if (std::isfinite(sim.del_cost)) m.add_arc(s, ph, kEpsilon, sim.del_cost, s);
  }

  std::set<std::pair<SymbolId, SymbolId>> emitted;
  for (const auto& [a, b] : sim.pairs) {
    SymbolId pa = phones_->find(a), pb = phones_->find(b);
    if (pa < 0) throw ConfigError("similar-phoneme pair references unknown phoneme '" + a + "'");
    if (pb < 0) throw ConfigError("similar-phoneme pair references unknown phoneme '" + b + "'");
    if (pa == pb) continue;
    if (emitted.insert({pa, pb}).second) m.add_arc(s, pa, pb, sim.sub_cost, s);
    if (emitted.insert({pb, pa}).second) m.add_arc(s, pb, pa, sim.sub_cost, s);
  }
  return m;
}

Wfst Lexicon::build_edit_fst() const {
  SimilarPhonemes sim;
  sim.pairs = similar_pairs_;
  sim.sub_cost = opts_.sub_cost;
  sim.del_cost = opts_.del_cost;
  return build_edit_fst(sim);
}

}  // namespace phonorank
