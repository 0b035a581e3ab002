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

#ifndef PHONORANK_SRC_CORPUS_H_
#define PHONORANK_SRC_CORPUS_H_

#include <array>
#include <cstdint>
#include <istream>
#include <string>
#include <unordered_map>
#include <vector>

#include "common.h"

namespace phonorank {

enum class Lang : uint8_t { kL1 = 0, kL2 = 1, kPunct = 2 };

const char* lang_tag(Lang lang);          // "l1" / "l2" / "punct"
Lang parse_lang_tag(std::string_view s);  // DataError on unknown tag

struct TaggedToken {
  std::string surface;  // non-empty, lower-cased
  Lang lang = Lang::kL1;

  bool is_word() const { return lang != Lang::kPunct; }
  auto operator<=>(const TaggedToken&) const = default;
};

enum class SentenceKind : uint8_t { kCs = 0, kMonoL1 = 1, kMonoL2 = 2 };

const char* sentence_kind_name(SentenceKind k);  // "cs" / "mono_l1" / "mono_l2"

struct GoldSentence {
  std::vector<TaggedToken> tokens;

  // CS iff both languages appear among non-punct tokens.
  SentenceKind kind() const;
  int word_count() const;  // non-punct tokens
  std::vector<std::string> word_surfaces() const;
  std::string to_tagged_line() const;  // surface/lang format
  bool operator==(const GoldSentence&) const = default;
};

struct TaggedCorpus {
  std::vector<GoldSentence> sentences;
  std::string source_id;
};

// Parses the `surface/lang` interchange format, one sentence per line.
// Lower-cases surfaces, skips empty lines and sentences with no word
// tokens, skips over-long sentences (cap below) with a warning. Malformed
// tokens raise DataError with line and token position.
struct LoadOptions {
  int max_tokens = 100;
};
TaggedCorpus load_tagged(std::istream& in, const std::string& source_id,
                         const LoadOptions& opts = {});

// Plain monolingual lines: lower-cases, removes parenthesized spans
// (nested, to the matching close), strips sentence-leading hyphens, splits
// punctuation characters into their own tokens, and tags word tokens with
// the given language. The cleaner is idempotent.
TaggedCorpus load_monolingual(std::istream& in, Lang lang, const std::string& source_id,
                              int64_t max_lines = 0, const LoadOptions& opts = {});

// Deterministic shuffle-then-partition split. Ratios must sum to 1 within
// 1e-6; bucket sizes differ from the exact ratio by less than one sentence
// (largest-remainder rounding). Returns per-bucket sentence indices into
// the input corpus, so splits are auditable.
struct SplitResult {
  std::array<TaggedCorpus, 3> parts;           // train, dev, test
  std::array<std::vector<int64_t>, 3> indices;
};
SplitResult split_corpus(const TaggedCorpus& corpus, const std::array<double, 3>& ratios,
                         uint64_t seed);

// Shared vocabulary with reserved sentinels. No unknown-token symbol
// exists: every evaluated token must be present, and only tokens seen in
// training data are trainable.
class Vocabulary {
 public:
  static constexpr int32_t kBos = 0;
  static constexpr int32_t kEos = 1;
  static constexpr int32_t kDrop = 2;  // word-dropout placeholder
  static constexpr int32_t kNumReserved = 3;

  Vocabulary();

  // Adds in first-occurrence order; flags the token trainable if requested.
  int32_t add(const std::string& token, bool trainable);
  void add_sentences(const std::vector<GoldSentence>& sentences, bool trainable);

  int32_t find(const std::string& token) const;  // -1 when absent
  int32_t require(const std::string& token) const;  // DataError when absent
  const std::string& token(int32_t id) const { return tokens_.at(static_cast<size_t>(id)); }
  bool trainable(int32_t id) const { return trainable_.at(static_cast<size_t>(id)); }
  int32_t size() const { return static_cast<int32_t>(tokens_.size()); }

  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::vector<bool>& trainable_flags() const { return trainable_; }

  std::vector<int32_t> encode(const GoldSentence& sentence) const;  // words only, no sentinels

  bool operator==(const Vocabulary& other) const {
    return tokens_ == other.tokens_ && trainable_ == other.trainable_;
  }

 private:
  std::vector<std::string> tokens_;
  std::vector<bool> trainable_;
  std::unordered_map<std::string, int32_t> id_of_;
};

// Union vocabulary: tokens of train_sources are trainable, tokens seen only
// in other_sources are frozen. Ids are assigned in first-occurrence order
// after the reserved sentinels, so the assignment is deterministic.
Vocabulary build_vocab(const std::vector<const TaggedCorpus*>& train_sources,
                       const std::vector<const TaggedCorpus*>& other_sources);

}  // namespace phonorank

#endif  // PHONORANK_SRC_CORPUS_H_
