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

#include "corpus.h"

#include <algorithm>
#include <cmath>

namespace phonorank {

const char* lang_tag(Lang lang) {
  switch (lang) {
    case Lang::kL1: return "l1";
    case Lang::kL2: return "l2";
    case Lang::kPunct: return "punct";
  }
  return "?";
}

Lang parse_lang_tag(std::string_view s) {
  if (s == "l1") return Lang::kL1;
  if (s == "l2") return Lang::kL2;
  if (s == "punct") return Lang::kPunct;
  throw DataError("unknown language tag '" + std::string(s) + "' (expected l1, l2 or punct)");
}

const char* sentence_kind_name(SentenceKind k) {
  switch (k) {
    case SentenceKind::kCs: return "cs";
    case SentenceKind::kMonoL1: return "mono_l1";
    case SentenceKind::kMonoL2: return "mono_l2";
  }
  return "?";
}

SentenceKind GoldSentence::kind() const {
  bool l1 = false, l2 = false;
  for (const auto& t : tokens) {
    if (t.lang == Lang::kL1) l1 = true;
    if (t.lang == Lang::kL2) l2 = true;
  }
  if (l1 && l2) return SentenceKind::kCs;
  return l2 ? SentenceKind::kMonoL2 : SentenceKind::kMonoL1;
}

int GoldSentence::word_count() const {
  int n = 0;
  for (const auto& t : tokens) n += t.is_word() ? 1 : 0;
  return n;
}

std::vector<std::string> GoldSentence::word_surfaces() const {
  std::vector<std::string> out;
  for (const auto& t : tokens)
    if (t.is_word()) out.push_back(t.surface);
  return out;
}

std::string GoldSentence::to_tagged_line() const {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t.surface;
    out += '/';
    out += lang_tag(t.lang);
  }
  return out;
}

TaggedCorpus load_tagged(std::istream& in, const std::string& source_id, const LoadOptions& opts) {
  TaggedCorpus corpus;
  corpus.source_id = source_id;
  std::string line;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_ws(line);
    if (fields.empty()) continue;
    if (static_cast<int>(fields.size()) > opts.max_tokens) {
      log_warn("%s:%lld: sentence longer than %d tokens, skipped", source_id.c_str(),
               static_cast<long long>(line_no), opts.max_tokens);
      continue;
    }
    GoldSentence sent;
    for (size_t k = 0; k < fields.size(); ++k) {
      const std::string& field = fields[k];
      size_t slash = field.rfind('/');
      if (slash == std::string::npos || slash == 0 || slash + 1 == field.size())
        throw DataError(source_id + ":" + std::to_string(line_no) + ": token " +
                        std::to_string(k + 1) + " ('" + field + "') is not in surface/lang form");
      TaggedToken tok;
      tok.surface = lower_ascii(field.substr(0, slash));
      tok.lang = parse_lang_tag(field.substr(slash + 1));
      sent.tokens.push_back(std::move(tok));
    }
    if (sent.word_count() == 0) {
      log_warn("%s:%lld: sentence has no word tokens, skipped", source_id.c_str(),
               static_cast<long long>(line_no));
      continue;
    }
    corpus.sentences.push_back(std::move(sent));
  }
  return corpus;
}

namespace {

bool is_word_byte(unsigned char c) {
  // Bytes >= 0x80 are UTF-8 continuation/lead bytes of accented letters.
  return isalnum(c) || c >= 0x80 || c == '\'';
}

// Lower-case, drop parenthesized spans (nested, to the matching close),
// strip leading hyphens.
std::string clean_monolingual_line(const std::string& raw) {
  std::string lowered = lower_ascii(raw);
  std::string no_parens;
  int depth = 0;
  for (char c : lowered) {
    if (c == '(') {
      ++depth;
    } else if (c == ')') {
      if (depth > 0) --depth;
      // A stray close with no open is kept as ordinary punctuation.
      else no_parens += c;
    } else if (depth == 0) {
      no_parens += c;
    }
  }
  std::string_view s = trim(no_parens);
  while (!s.empty() && (s.front() == '-' || isspace(static_cast<unsigned char>(s.front()))))
    s.remove_prefix(1);
  return std::string(s);
}

void append_tokens(const std::string& field, Lang lang, std::vector<TaggedToken>& out) {
  size_t b = 0, e = field.size();
  std::vector<TaggedToken> trailing;
  while (b < e && !is_word_byte(static_cast<unsigned char>(field[b])))
    out.push_back(TaggedToken{std::string(1, field[b++]), Lang::kPunct});
  while (e > b && !is_word_byte(static_cast<unsigned char>(field[e - 1])))
    trailing.push_back(TaggedToken{std::string(1, field[--e]), Lang::kPunct});
  if (e > b) out.push_back(TaggedToken{field.substr(b, e - b), lang});
  out.insert(out.end(), trailing.rbegin(), trailing.rend());
}

}  // namespace

TaggedCorpus load_monolingual(std::istream& in, Lang lang, const std::string& source_id,
                              int64_t max_lines, const LoadOptions& opts) {
  if (lang == Lang::kPunct) throw ConfigError("load_monolingual: language must be l1 or l2");
  TaggedCorpus corpus;
  corpus.source_id = source_id;
  std::string line;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (max_lines > 0 && line_no > max_lines) break;
    std::string cleaned = clean_monolingual_line(line);
    GoldSentence sent;
    for (const std::string& field : split_ws(cleaned)) append_tokens(field, lang, sent.tokens);
    if (sent.tokens.empty() || sent.word_count() == 0) continue;
    if (static_cast<int>(sent.tokens.size()) > opts.max_tokens) {
      log_warn("%s:%lld: sentence longer than %d tokens, skipped", source_id.c_str(),
               static_cast<long long>(line_no), opts.max_tokens);
      continue;
    }
    corpus.sentences.push_back(std::move(sent));
  }
  return corpus;
}

SplitResult split_corpus(const TaggedCorpus& corpus, const std::array<double, 3>& ratios,
                         uint64_t seed) {
  double total = ratios[0] + ratios[1] + ratios[2];
  if (std::abs(total - 1.0) > 1e-6)
    throw ConfigError("split ratios must sum to 1, got " + std::to_string(total));

  int64_t n = static_cast<int64_t>(corpus.sentences.size());
  std::array<int64_t, 3> sizes{};
  std::array<double, 3> fractional{};
  int64_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    double exact = static_cast<double>(n) * ratios[i];
    sizes[i] = static_cast<int64_t>(std::floor(exact));
    fractional[i] = exact - static_cast<double>(sizes[i]);
    assigned += sizes[i];
  }
  while (assigned < n) {  // largest remainder first, ties to the earlier bucket
    int best = 0;
    for (int i = 1; i < 3; ++i)
      if (fractional[i] > fractional[best]) best = i;
    ++sizes[best];
    fractional[best] = -1.0;
    ++assigned;
  }

  std::vector<int64_t> order(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
  Rng rng(derive_seed(seed, "corpus_split"));
  rng.shuffle(order);

  SplitResult result;
  int64_t cursor = 0;
  for (int part = 0; part < 3; ++part) {
    auto& idx = result.indices[static_cast<size_t>(part)];
    idx.assign(order.begin() + cursor, order.begin() + cursor + sizes[static_cast<size_t>(part)]);
    std::sort(idx.begin(), idx.end());  // keep corpus order within each split
    cursor += sizes[static_cast<size_t>(part)];
    auto& out = result.parts[static_cast<size_t>(part)];
    out.source_id = corpus.source_id;
    for (int64_t i : idx) out.sentences.push_back(corpus.sentences[static_cast<size_t>(i)]);
  }
  return result;
}

Vocabulary::Vocabulary() {
  add("<s>", true);
  add("</s>", true);
  add("<drop>", true);
}

int32_t Vocabulary::add(const std::string& token, bool trainable) {
  auto it = id_of_.find(token);
  if (it != id_of_.end()) {
    if (trainable) trainable_[static_cast<size_t>(it->second)] = true;
    return it->second;
  }
  int32_t id = static_cast<int32_t>(tokens_.size());
  tokens_.push_back(token);
  trainable_.push_back(trainable);
  id_of_.emplace(token, id);
  return id;
}

void Vocabulary::add_sentences(const std::vector<GoldSentence>& sentences, bool trainable) {
  for (const auto& s : sentences)
    for (const auto& t : s.tokens)
      if (t.is_word()) add(t.surface, trainable);
}

int32_t Vocabulary::find(const std::string& token) const {
  auto it = id_of_.find(token);
  return it == id_of_.end() ? -1 : it->second;
}

int32_t Vocabulary::require(const std::string& token) const {
  int32_t id = find(token);
  if (id < 0) throw DataError("token '" + token + "' is not in the vocabulary");
  return id;
}

std::vector<int32_t> Vocabulary::encode(const GoldSentence& sentence) const {
  std::vector<int32_t> out;
  for (const auto& t : sentence.tokens)
    if (t.is_word()) out.push_back(require(t.surface));
  return out;
}

Vocabulary build_vocab(const std::vector<const TaggedCorpus*>& train_sources,
                       const std::vector<const TaggedCorpus*>& other_sources) {
  Vocabulary v;
  for (const TaggedCorpus* c : train_sources) v.add_sentences(c->sentences, true);
  for (const TaggedCorpus* c : other_sources) v.add_sentences(c->sentences, false);
  return v;
}

}  // namespace phonorank
