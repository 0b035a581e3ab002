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

#include "config.h"

#include <cstdlib>
#include <set>
#include <sstream>

namespace phonorank {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "seed",
      // corpus preparation
      "corpus.tagged", "corpus.mono_l1", "corpus.mono_l2", "corpus.mono_lines",
      "corpus.max_tokens", "corpus.split_train", "corpus.split_dev", "corpus.split_test",
      "corpus.out_dir",
      // lexicon resources
      "lex.l1_dict", "lex.l2_dict", "lex.l2_phoneme_map", "lex.unigrams_l1", "lex.unigrams_l2",
      "lex.similar", "lex.filter", "lex.sub_cost", "lex.del_cost", "lex.unigram_scale",
      // dataset generation
      "gen.corpus_dir", "gen.out_dir", "gen.nbest", "gen.top_k", "gen.min_alts", "gen.min_words",
      "gen.span_min", "gen.span_max", "gen.w_cost", "gen.w_minority", "gen.w_len", "gen.sets",
      "gen.cs_fraction", "gen.workers", "gen.train_sets", "gen.train_sets_limit", "gen.mono_sets",
      "gen.mono_fraction", "gen.mono_require_all_types", "gen.expansion_cap",
      // training
      "train.protocol", "train.corpus_dir", "train.sets_cs", "train.sets_mono",
      "train.dataset_dev", "train.dataset_test", "train.extend_vocab_mono", "train.emb_dim",
      "train.hidden_dim", "train.repr", "train.lr", "train.lr_decay", "train.lr_floor",
      "train.clip", "train.clip_mode", "train.weight_decay", "train.batch", "train.max_epochs",
      "train.pretrain_epochs", "train.word_dropout", "train.dropout", "train.cs_fraction",
      "train.out_dir", "train.run_name",
      // evaluation and reporting
      "eval.checkpoint", "eval.dataset", "eval.out_prefix", "eval.split", "eval.label",
      "report.text_out", "report.json_out",
  };
  return keys;
}

}  // namespace

RunConfig RunConfig::from_file(const std::string& path) {
  RunConfig cfg;
  std::istringstream in(read_file(path));
  std::string line, section;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = trim(line);
    if (body.empty() || body[0] == '#' || body[0] == ';') continue;
    if (body.front() == '[' && body.back() == ']') {
      section = std::string(trim(body.substr(1, body.size() - 2)));
      continue;
    }
    size_t eq = body.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected 'key = value'");
    std::string key(trim(body.substr(0, eq)));
    std::string value(trim(body.substr(eq + 1)));
    if (!section.empty()) key = section + "." + key;
    cfg.set(key, value);
  }
  return cfg;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (!known_keys().count(key)) throw ConfigError("unknown configuration key '" + key + "'");
  entries_[key] = value;
}

bool RunConfig::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string RunConfig::get_str(const std::string& key, const std::string& fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

std::string RunConfig::require_str(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing required configuration key '" + key + "'");
  return it->second;
}

int64_t RunConfig::get_int(const std::string& key, int64_t fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  char* end = nullptr;
  long long v = strtoll(it->second.c_str(), &end, 10);
  if (end == it->second.c_str() || *end != '\0')
    throw ConfigError("key '" + key + "' expects an integer, got '" + it->second + "'");
  return v;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  char* end = nullptr;
  double v = strtod(it->second.c_str(), &end);
  if (end == it->second.c_str() || *end != '\0')
    throw ConfigError("key '" + key + "' expects a number, got '" + it->second + "'");
  return v;
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "' expects a boolean, got '" + v + "'");
}

uint64_t RunConfig::seed() const {
  if (has("seed")) return static_cast<uint64_t>(get_int("seed", 1));
  if (const char* env = std::getenv("PHONORANK_SEED")) {
    char* end = nullptr;
    unsigned long long v = strtoull(env, &end, 10);
    if (end != env && *end == '\0') return v;
    log_warn("ignoring unparsable PHONORANK_SEED value '%s'", env);
  }
  return 1;
}

}  // namespace phonorank
