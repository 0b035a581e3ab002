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

#include "synth.h"

#include <filesystem>
#include <map>
#include <sstream>
#include <vector>

namespace phonorank {
namespace testing {

namespace {

struct SynthWord {
  std::string surface;
  std::vector<std::string> phones;
};

// Surface form is the lower-cased letter of each phoneme.
SynthWord make_word(std::initializer_list<const char*> phones,
                    const std::map<std::string, char>& letters) {
  SynthWord w;
  for (const char* ph : phones) {
    w.phones.push_back(ph);
    w.surface += letters.at(ph);
  }
  return w;
}

std::string dict_text(const std::vector<SynthWord>& words) {
  std::ostringstream out;
  for (const SynthWord& w : words) {
    out << w.surface << " ";
    for (const auto& ph : w.phones) out << ' ' << ph;
    out << '\n';
  }
  return out.str();
}

std::string zipf_unigrams(const std::vector<SynthWord>& words) {
  std::ostringstream out;
  for (size_t i = 0; i < words.size(); ++i)
    out << words[i].surface << '\t' << 1000 / (i + 1) + 1 << '\n';
  return out.str();
}

void base_lexicon_keys(RunConfig& cfg, const std::string& dir) {
  cfg.set("lex.l1_dict", dir + "/l1.dict");
  cfg.set("lex.l2_dict", dir + "/l2.dict");
  cfg.set("lex.similar", dir + "/similar.tsv");
  cfg.set("lex.unigrams_l1", dir + "/unigrams_l1.tsv");
  cfg.set("lex.unigrams_l2", dir + "/unigrams_l2.tsv");
  cfg.set("corpus.tagged", dir + "/corpus.tagged");
  cfg.set("corpus.out_dir", dir + "/prep");
  cfg.set("gen.corpus_dir", dir + "/prep");
  cfg.set("gen.out_dir", dir + "/gen");
}

}  // namespace

OverlapWorld make_overlap_world(const std::string& dir, int n_sentences, uint64_t seed) {
  std::filesystem::create_directories(dir);
  const std::map<std::string, char> letters = {{"P", 'p'}, {"T", 't'},  {"K", 'k'},  {"S", 's'},
                                               {"M", 'm'}, {"AA", 'a'}, {"IY", 'i'}, {"UW", 'u'},
                                               {"EH", 'e'}, {"OW", 'o'}};
  const char* cons[] = {"P", "T", "K", "S", "M"};
  const char* l1_vowels[] = {"AA", "IY"};
  const char* l2_vowels[] = {"UW", "EH", "OW"};

  std::vector<SynthWord> l1, l2;
  for (const char* c : cons)
    for (const char* v : l1_vowels) l1.push_back(make_word({c, v}, letters));
  for (const char* c1 : cons)
    for (const char* v : l1_vowels)
      for (const char* c2 : cons) {
        if (l1.size() >= 50) break;
        l1.push_back(make_word({c1, v, c2}, letters));
      }
  for (const char* c : cons)
    for (const char* v : l2_vowels) l2.push_back(make_word({c, v}, letters));
  for (const char* c1 : cons)
    for (const char* v : l2_vowels)
      for (const char* c2 : cons) {
        if (l2.size() >= 50) break;
        l2.push_back(make_word({c1, v, c2}, letters));
      }

  write_file(dir + "/l1.dict", dict_text(l1));
  write_file(dir + "/l2.dict", dict_text(l2));
  write_file(dir + "/similar.tsv",
             "P T\nT K\nK S\nS M\nAA IY\nAA EH\nAA OW\nIY UW\nUW EH\nEH OW\n");
  write_file(dir + "/unigrams_l1.tsv", zipf_unigrams(l1));
  write_file(dir + "/unigrams_l2.tsv", zipf_unigrams(l2));

  Rng rng(derive_seed(seed, "overlap_corpus"));
  std::ostringstream corpus;
  for (int i = 0; i < n_sentences; ++i) {
    int len = static_cast<int>(rng.int_in(3, 6));
    bool cs = i % 2 == 0;
    bool mono_l2 = i % 4 == 1;
    for (int k = 0; k < len; ++k) {
      bool use_l2 = cs ? (k % 2 == 1 ? true : rng.bernoulli(0.3)) : mono_l2;
      const SynthWord& w =
          use_l2 ? l2[rng.below(l2.size())] : l1[rng.below(l1.size())];
      corpus << w.surface << (use_l2 ? "/l2 " : "/l1 ");
    }
    if (rng.bernoulli(0.5)) corpus << "./punct";
    corpus << '\n';
  }
  write_file(dir + "/corpus.tagged", corpus.str());

  OverlapWorld world;
  world.dir = dir;
  world.config.set("seed", std::to_string(seed));
  base_lexicon_keys(world.config, dir);
  return world;
}

DisjointWorld make_disjoint_world(const std::string& dir, int n_cs_sentences, int n_mono_lines,
                                  uint64_t seed) {
  std::filesystem::create_directories(dir);
  const std::map<std::string, char> letters = {
      {"P", 'p'}, {"T", 't'}, {"K", 'k'}, {"S", 's'}, {"M", 'm'}, {"N", 'n'},
      {"AA", 'a'}, {"IY", 'i'}, {"UW", 'u'},
      {"B", 'b'}, {"D", 'd'}, {"G", 'g'}, {"Z", 'z'}, {"L", 'l'}, {"R", 'r'},
      {"EH", 'e'}, {"OW", 'o'}};
  const char* a_cons[] = {"P", "T", "K", "S", "M", "N"};
  const char* a_vowels[] = {"AA", "IY", "UW"};
  const char* b_cons[] = {"B", "D", "G", "Z", "L", "R"};
  const char* b_vowels[] = {"EH", "OW"};

  std::vector<SynthWord> a_words, b_words;
  for (const char* c1 : a_cons)
    for (const char* v : a_vowels)
      for (const char* c2 : a_cons)
        if (a_words.size() < 50) a_words.push_back(make_word({c1, v, c2}, letters));
  for (const char* c1 : b_cons)
    for (const char* v : b_vowels)
      for (const char* c2 : b_cons)
        if (b_words.size() < 50) b_words.push_back(make_word({c1, v, c2}, letters));

  write_file(dir + "/l1.dict", dict_text(a_words));
  write_file(dir + "/l2.dict", dict_text(b_words));
  write_file(dir + "/similar.tsv", "P T\nK S\nM N\nAA IY\nIY UW\nB D\nG Z\nL R\nEH OW\n");
  write_file(dir + "/unigrams_l1.tsv", zipf_unigrams(a_words));
  write_file(dir + "/unigrams_l2.tsv", zipf_unigrams(b_words));

  // Sparse bigram grammars: each word allows three successors. Alternatives
  // produced by phonetic confusion mostly leave the grammar, which is what
  // makes gold sentences identifiable.
  auto succ_a = [](size_t i) {
    return std::array<size_t, 3>{(7 * i + 1) % 50, (3 * i + 11) % 50, (13 * i + 29) % 50};
  };
  auto succ_b = [](size_t i) {
    return std::array<size_t, 3>{(11 * i + 2) % 50, (5 * i + 17) % 50, (9 * i + 23) % 50};
  };

  Rng rng(derive_seed(seed, "disjoint_corpus"));
  auto walk = [&](auto succ, size_t start, int steps, std::vector<size_t>& out) {
    size_t cur = start;
    out.push_back(cur);
    for (int s = 1; s < steps; ++s) {
      auto next = succ(cur);
      cur = next[rng.below(3)];
      out.push_back(cur);
    }
  };

  std::ostringstream cs_corpus;
  for (int i = 0; i < n_cs_sentences; ++i) {
    std::vector<size_t> a_part, b_part, a_tail;
    walk(succ_a, rng.below(50), static_cast<int>(rng.int_in(2, 3)), a_part);
    // The switch point is grammatical too: the B start is tied to the last
    // A word.
    walk(succ_b, a_part.back(), static_cast<int>(rng.int_in(2, 3)), b_part);
    if (rng.bernoulli(0.4)) walk(succ_a, b_part.back(), 2, a_tail);
    for (size_t w : a_part) cs_corpus << a_words[w].surface << "/l1 ";
    for (size_t w : b_part) cs_corpus << b_words[w].surface << "/l2 ";
    for (size_t w : a_tail) cs_corpus << a_words[w].surface << "/l1 ";
    cs_corpus << '\n';
  }
  write_file(dir + "/corpus.tagged", cs_corpus.str());

  std::ostringstream mono_a, mono_b;
  for (int i = 0; i < n_mono_lines; ++i) {
    std::vector<size_t> part;
    walk(succ_a, rng.below(50), static_cast<int>(rng.int_in(4, 6)), part);
    for (size_t w : part) mono_a << a_words[w].surface << ' ';
    mono_a << '\n';
    part.clear();
    walk(succ_b, rng.below(50), static_cast<int>(rng.int_in(4, 6)), part);
    for (size_t w : part) mono_b << b_words[w].surface << ' ';
    mono_b << '\n';
  }
  write_file(dir + "/mono_l1.txt", mono_a.str());
  write_file(dir + "/mono_l2.txt", mono_b.str());

  DisjointWorld world;
  world.dir = dir;
  world.config.set("seed", std::to_string(seed));
  base_lexicon_keys(world.config, dir);
  world.config.set("corpus.mono_l1", dir + "/mono_l1.txt");
  world.config.set("corpus.mono_l2", dir + "/mono_l2.txt");
  return world;
}

}  // namespace testing
}  // namespace phonorank
