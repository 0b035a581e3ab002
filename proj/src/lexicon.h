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

#ifndef PHONORANK_SRC_LEXICON_H_
#define PHONORANK_SRC_LEXICON_H_

#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "corpus.h"
#include "wfst.h"

namespace phonorank {

using Pronunciation = std::vector<std::string>;  // phoneme surface forms

struct PronEntry {
  std::string word;  // lower-cased surface
  Lang language = Lang::kL1;
  std::vector<Pronunciation> pronunciations;  // at least one
};

// One language's worth of dictionary entries prior to merging.
struct LexiconFragment {
  Lang language = Lang::kL1;
  // Word order follows first appearance in the source file.
  std::vector<PronEntry> entries;
};

// Source phoneme -> one or more alternative target sequences, e.g.
// ll -> {L Y} and ll -> {SH}.
struct PhonemeMap {
  std::map<std::string, std::vector<Pronunciation>> targets;
};

// Symmetric confusable pairs plus the edit penalties, in -ln units.
struct SimilarPhonemes {
  std::vector<std::pair<std::string, std::string>> pairs;
  double sub_cost = 3.0;
  double del_cost = 4.0;
};

// Parses the CMU pronouncing dictionary format:
//   WORD  PH1 PH2 ...
//   WORD(2)  PH1 ...        variant pronunciations
//   ;;; comment
// Words are lower-cased, stress digits are stripped (AE1 -> AE) and
// variants merge into one entry. Malformed lines raise DataError with the
// line number.
LexiconFragment load_pron_dict(std::istream& in, Lang language, const std::string& source_id);

// Canonical text form of a fragment; load(save(x)) == x.
std::string save_pron_dict(const LexiconFragment& fragment);

// `SRC<TAB or spaces>TGT1 TGT2` lines; repeated SRC lines accumulate
// alternatives. Used for both phoneme maps and similar-phoneme pairs.
PhonemeMap load_phoneme_map(std::istream& in, const std::string& source_id);
std::vector<std::pair<std::string, std::string>> load_similar_pairs(std::istream& in,
                                                                    const std::string& source_id);

// Rewrites every pronunciation through the map. Sources with several
// alternatives multiply out to the cross-product of pronunciations. Every
// phoneme present in the fragment must be mapped (DataError naming the
// phoneme and word otherwise).
LexiconFragment apply_phoneme_map(const LexiconFragment& fragment, const PhonemeMap& map);

// `word<TAB>count` or `word<TAB>prob` lines; probabilities are detected by
// the column summing to (about) one, counts are normalized.
std::map<std::string, double> load_unigrams(std::istream& in, const std::string& source_id);

struct LexiconOptions {
  double sub_cost = 3.0;
  double del_cost = 4.0;
  double unigram_scale = 0.1;       // lambda on -ln p(word)
  double unigram_floor = 1e-9;      // probability for words missing a unigram
  // nullopt = default stoplist: single-character words except a i y o e u.
  std::optional<std::set<std::string>> filter_words;
};

// Merged bilingual lexicon with the unified phoneme inventory and the
// word symbol table used by every decoding transducer. Immutable once
// built; the compiled transducers are pure values.
class Lexicon {
 public:
  Lexicon(std::vector<LexiconFragment> fragments,
          std::map<std::string, double> unigrams_l1,
          std::map<std::string, double> unigrams_l2,
          const LexiconOptions& opts = {});

  // First-listed pronunciation, or nullopt when (word, lang) is absent.
  const PronEntry* entry(const std::string& word, Lang lang) const;
  bool filtered(const std::string& word) const { return filters_.count(word) > 0; }
  double unigram_prob(const std::string& word, Lang lang) const;  // floored

  const SymbolTablePtr& phoneme_symbols() const { return phones_; }
  // Word symbols are language-tagged 'surface/lang' strings so decoded
  // paths carry their language.
  const SymbolTablePtr& word_symbols() const { return words_; }
  const LexiconOptions& options() const { return opts_; }
  size_t num_entries() const { return by_key_.size(); }

  // Transducer from tagged-word sequences to phoneme sequences, zero cost,
  // restricted to the given languages.
  Wfst build_word2phone(const std::set<Lang>& languages) const;

  // Inverse decoding transducer: phoneme sequences to tagged-word
  // sequences, each word costing unigram_scale * -ln p(word); filtered
  // words are excluded entirely. A subset of languages gives the
  // monolingual decoders.
  Wfst build_phone2word(const std::set<Lang>& languages, double unigram_scale) const;
  Wfst build_phone2word(const std::set<Lang>& languages) const {
    return build_phone2word(languages, opts_.unigram_scale);
  }

  // Single-state edit transducer over the phoneme inventory: identity arcs
  // at zero cost, substitutions from sim at sub_cost (both directions of
  // each pair), deletions at del_cost. An infinite del_cost disables
  // deletion arcs.
  Wfst build_edit_fst(const SimilarPhonemes& sim) const;
  Wfst build_edit_fst() const;  // uses the pairs and costs given at build time

  void set_similar_pairs(std::vector<std::pair<std::string, std::string>> pairs) {
    similar_pairs_ = std::move(pairs);
  }
  const std::vector<std::pair<std::string, std::string>>& similar_pairs() const {
    return similar_pairs_;
  }

 private:
  std::map<std::pair<std::string, Lang>, PronEntry> by_key_;
  std::vector<std::pair<std::string, Lang>> key_order_;  // insertion order
  std::map<std::string, double> unigrams_[2];
  std::set<std::string> filters_;
  std::vector<std::pair<std::string, std::string>> similar_pairs_;
  SymbolTablePtr phones_;
  SymbolTablePtr words_;
  LexiconOptions opts_;
};

// Default word stoplist mirroring "single letter words that are too
// frequent": every single-character word except a i y o e u.
bool default_filtered_word(const std::string& word);

}  // namespace phonorank

#endif  // PHONORANK_SRC_LEXICON_H_
