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

#include <cmath>
#include <sstream>

#include "doctest.h"
#include "oracles.h"

using namespace phonorank;
using namespace phonorank::testing;

namespace {

LexiconFragment frag_from(const char* text, Lang lang = Lang::kL1) {
  std::istringstream in(text);
  return load_pron_dict(in, lang, "test_dict");
}

Lexicon toy_lexicon(const LexiconOptions& opts = {}) {
  // Shared 6-phoneme inventory across both languages.
  LexiconFragment l1 = frag_from(
      "CAT  K AE1 T\n"
      "KIT  K IH1 T\n"
      "SEE  S IY1\n"
      "ZEE  Z IY1\n"
      "TEA  T IY1\n"
      "X  K S\n",
      Lang::kL1);
  LexiconFragment l2 = frag_from(
      "GATO  K AE T\n"
      "SI  S IY\n"
      "TI  T IY\n",
      Lang::kL2);
  return Lexicon({l1, l2}, {{"cat", 0.2}, {"kit", 0.01}, {"see", 0.3}}, {{"si", 0.4}}, opts);
}

std::vector<SymbolId> phones(const Lexicon& lex, std::initializer_list<const char*> names) {
  std::vector<SymbolId> out;
  for (const char* n : names) {
    SymbolId id = lex.phoneme_symbols()->find(n);
    REQUIRE(id > 0);
    out.push_back(id);
  }
  return out;
}

}  // namespace

TEST_CASE("load_pron_dict parses the CMU format") {
  LexiconFragment f = frag_from(
      ";;; a comment line\n"
      "CAT  K AE1 T\n"
      "READ  R IY1 D\n"
      "READ(2)  R EH1 D\n");
  REQUIRE(f.entries.size() == 2);
  CHECK(f.entries[0].word == "cat");
  CHECK(f.entries[0].pronunciations == std::vector<Pronunciation>{{"K", "AE", "T"}});
  CHECK(f.entries[1].word == "read");
  REQUIRE(f.entries[1].pronunciations.size() == 2);
  CHECK(f.entries[1].pronunciations[1] == Pronunciation{"R", "EH", "D"});
}

TEST_CASE("load_pron_dict reports the failing line") {
  std::istringstream in("CAT K AE T\nJUSTAWORD\n");
  try {
    load_pron_dict(in, Lang::kL1, "dict");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("dict:2") != std::string::npos);
  }
}

TEST_CASE("pron dict round-trips through its text form") {
  LexiconFragment f = frag_from(
      "CAT  K AE1 T\n"
      "READ  R IY1 D\n"
      "READ(2)  R EH1 D\n"
      "A  AH0\n");
  std::string text = save_pron_dict(f);
  std::istringstream in(text);
  LexiconFragment g = load_pron_dict(in, Lang::kL1, "rt");
  REQUIRE(f.entries.size() == g.entries.size());
  for (size_t i = 0; i < f.entries.size(); ++i) {
    CHECK(f.entries[i].word == g.entries[i].word);
    CHECK(f.entries[i].pronunciations == g.entries[i].pronunciations);
  }
  CHECK(save_pron_dict(g) == text);
}

TEST_CASE("apply_phoneme_map rewrites pronunciations") {
  LexiconFragment es = frag_from("CHURRO  ch u rr o\n", Lang::kL2);

  SUBCASE("single-target mapping") {
    PhonemeMap map;
    map.targets["ch"] = {{"CH"}};
    map.targets["u"] = {{"UW"}};
    map.targets["rr"] = {{"R"}};
    map.targets["o"] = {{"OW"}};
    LexiconFragment out = apply_phoneme_map(es, map);
    CHECK(out.entries[0].pronunciations == std::vector<Pronunciation>{{"CH", "UW", "R", "OW"}});
  }

  SUBCASE("multi-target source doubles the pronunciation count") {
    LexiconFragment calle = frag_from("CALLE  k a ll e\n", Lang::kL2);
    PhonemeMap map;
    map.targets["k"] = {{"K"}};
    map.targets["a"] = {{"AA"}};
    map.targets["ll"] = {{"L", "Y"}, {"SH"}};  // two alternatives, one multi-phoneme
    map.targets["e"] = {{"EY"}};
    LexiconFragment out = apply_phoneme_map(calle, map);
    REQUIRE(out.entries[0].pronunciations.size() == 2);
    CHECK(out.entries[0].pronunciations[0] == Pronunciation{"K", "AA", "L", "Y", "EY"});
    CHECK(out.entries[0].pronunciations[1] == Pronunciation{"K", "AA", "SH", "EY"});
  }

  SUBCASE("identity map leaves the fragment unchanged") {
    PhonemeMap map;
    for (const char* ph : {"ch", "u", "rr", "o"}) map.targets[ph] = {{ph}};
    LexiconFragment out = apply_phoneme_map(es, map);
    CHECK(out.entries[0].pronunciations == es.entries[0].pronunciations);
  }

  SUBCASE("unmapped phoneme names the phoneme and the word") {
    PhonemeMap map;
    map.targets["ch"] = {{"CH"}};
    try {
      apply_phoneme_map(es, map);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      std::string msg = e.what();
      CHECK(msg.find("'u'") != std::string::npos);
      CHECK(msg.find("churro") != std::string::npos);
    }
  }

  SUBCASE("word count is never changed by mapping") {
    PhonemeMap map;
    for (const char* ph : {"ch", "u", "rr", "o"}) map.targets[ph] = {{"X"}, {"Y", "Z"}};
    LexiconFragment out = apply_phoneme_map(es, map);
    CHECK(out.entries.size() == es.entries.size());
  }
}

TEST_CASE("unigram tables auto-detect probabilities vs counts") {
  std::istringstream probs("cat\t0.6\ndog\t0.4\n");
  auto p = load_unigrams(probs, "u");
  CHECK(p["cat"] == doctest::Approx(0.6));
  std::istringstream counts("cat\t30\ndog\t10\n");
  auto c = load_unigrams(counts, "u");
  CHECK(c["cat"] == doctest::Approx(0.75));
  CHECK(c["dog"] == doctest::Approx(0.25));
  std::istringstream bad("cat\t-3\n");
  CHECK_THROWS_AS(load_unigrams(bad, "u"), DataError);
}

TEST_CASE("word2phone maps word sequences to their pronunciations") {
  Lexicon lex = toy_lexicon();
  Wfst w2p = lex.build_word2phone({Lang::kL1, Lang::kL2});

  SymbolId cat = lex.word_symbols()->find("cat/l1");
  REQUIRE(cat > 0);

  SUBCASE("single word at zero cost") {
    Wfst sent = linear_acceptor({cat}, lex.word_symbols());
    auto paths = nbest(compose(sent, w2p), 4);
    REQUIRE(paths.size() == 1);
    CHECK(paths[0].output == phones(lex, {"K", "AE", "T"}));
    CHECK(paths[0].weight == 0.0);
  }

  SUBCASE("two-word input concatenates pronunciations") {
    SymbolId see = lex.word_symbols()->find("see/l1");
    Wfst sent = linear_acceptor({cat, see}, lex.word_symbols());
    auto paths = nbest(compose(sent, w2p), 4);
    REQUIRE(paths.size() == 1);
    CHECK(paths[0].output == phones(lex, {"K", "AE", "T", "S", "IY"}));
  }

  SUBCASE("matches direct concatenation over short random sentences") {
    Rng rng(17);
    std::vector<std::pair<std::string, Lang>> words = {
        {"cat", Lang::kL1}, {"kit", Lang::kL1}, {"see", Lang::kL1},
        {"gato", Lang::kL2}, {"si", Lang::kL2}};
    for (int trial = 0; trial < 40; ++trial) {
      int len = static_cast<int>(rng.int_in(1, 3));
      std::vector<SymbolId> sent_syms;
      std::vector<std::string> want_phones;
      for (int i = 0; i < len; ++i) {
        auto& [w, lang] = words[static_cast<size_t>(rng.below(words.size()))];
        sent_syms.push_back(
            lex.word_symbols()->find(w + "/" + lang_tag(lang)));
        const auto& pron = lex.entry(w, lang)->pronunciations[0];
        want_phones.insert(want_phones.end(), pron.begin(), pron.end());
      }
      Wfst sent = linear_acceptor(sent_syms, lex.word_symbols());
      auto paths = nbest(compose(sent, w2p), 8);
      REQUIRE(!paths.empty());
      std::vector<SymbolId> want;
      for (const auto& ph : want_phones) want.push_back(lex.phoneme_symbols()->find(ph));
      // Single pronunciation per word in this lexicon, so exactly one path.
      CHECK(paths[0].output == want);
      CHECK(paths[0].weight == 0.0);
    }
  }
}

TEST_CASE("phone2word decoding") {
  Lexicon lex = toy_lexicon();

  SUBCASE("lambda zero is pure inversion with zero word costs") {
    Wfst p2w = lex.build_phone2word({Lang::kL1, Lang::kL2}, 0.0);
    Wfst in = linear_acceptor(phones(lex, {"K", "AE", "T"}), lex.phoneme_symbols());
    auto paths = nbest(compose(in, p2w), 8);
    REQUIRE(paths.size() == 2);  // cat/l1 and gato/l2 are homophones here
    CHECK(paths[0].weight == 0.0);
    CHECK(paths[1].weight == 0.0);
  }

  SUBCASE("homophone costs differ by lambda times the log unigram ratio") {
    // see (p=0.3) vs zee (floored): same pronunciation tail IY after S/Z --
    // use cat (0.2) vs kit (0.01) instead? They differ in phonemes. Build
    // homophones via the two readings of 'K AE T': cat/l1 p=0.2 and
    // gato/l2 with no unigram entry (floor).
    double lambda = 0.25;
    Wfst p2w = lex.build_phone2word({Lang::kL1, Lang::kL2}, lambda);
    Wfst in = linear_acceptor(phones(lex, {"K", "AE", "T"}), lex.phoneme_symbols());
    auto paths = nbest(compose(in, p2w), 8);
    REQUIRE(paths.size() == 2);
    SymbolId cat = lex.word_symbols()->find("cat/l1");
    CHECK(paths[0].output == std::vector<SymbolId>{cat});  // frequent word wins
    double want_gap = lambda * std::log(0.2 / 1e-9);
    CHECK(paths[1].weight - paths[0].weight == doctest::Approx(want_gap).epsilon(1e-9));
  }

  SUBCASE("filtered words never appear in decoded output") {
    Lexicon lex_default = toy_lexicon();  // default stoplist drops 'x'
    Wfst p2w = lex_default.build_phone2word({Lang::kL1, Lang::kL2}, 0.0);
    Wfst in = linear_acceptor(phones(lex_default, {"K", "S"}), lex_default.phoneme_symbols());
    auto paths = nbest(compose(in, p2w), 16);
    SymbolId x = lex_default.word_symbols()->find("x/l1");
    for (const Path& p : paths)
      for (SymbolId s : p.output) CHECK(s != x);
  }

  SUBCASE("increasing lambda never decreases a path cost") {
    Wfst in = linear_acceptor(phones(lex, {"K", "AE", "T", "S", "IY"}), lex.phoneme_symbols());
    std::map<std::vector<SymbolId>, double> prev;
    for (double lambda : {0.0, 0.1, 0.5, 1.0}) {
      Wfst p2w = lex.build_phone2word({Lang::kL1, Lang::kL2}, lambda);
      auto paths = nbest(compose(in, p2w), 16);
      std::map<std::vector<SymbolId>, double> cur;
      for (const Path& p : paths) cur[p.output] = p.weight;
      for (auto& [output, weight] : cur) {
        auto it = prev.find(output);
        if (it != prev.end()) CHECK(weight >= it->second);
      }
      prev = std::move(cur);
    }
  }

  SUBCASE("language restriction excludes the other language entirely") {
    Wfst p2w = lex.build_phone2word({Lang::kL1}, 0.0);
    Wfst in = linear_acceptor(phones(lex, {"K", "AE", "T"}), lex.phoneme_symbols());
    auto paths = nbest(compose(in, p2w), 8);
    REQUIRE(paths.size() == 1);
    CHECK(paths[0].output == std::vector<SymbolId>{lex.word_symbols()->find("cat/l1")});
  }
}

TEST_CASE("edit transducer") {
  Lexicon lex = toy_lexicon();

  SUBCASE("no pairs and infinite deletion cost gives the identity") {
    SimilarPhonemes sim;
    sim.del_cost = kInfiniteWeight;
    Wfst edit = lex.build_edit_fst(sim);
    Wfst in = linear_acceptor(phones(lex, {"S", "IY"}), lex.phoneme_symbols());
    auto paths = nbest(compose(in, edit), 10);
    REQUIRE(paths.size() == 1);
    CHECK(paths[0].output == phones(lex, {"S", "IY"}));
    CHECK(paths[0].weight == 0.0);
  }

  SUBCASE("a pair substitutes in both directions at sub_cost") {
    SimilarPhonemes sim;
    sim.pairs = {{"S", "Z"}};
    sim.sub_cost = 1.5;
    sim.del_cost = kInfiniteWeight;
    Wfst edit = lex.build_edit_fst(sim);
    Wfst in = linear_acceptor(phones(lex, {"S"}), lex.phoneme_symbols());
    auto paths = nbest(compose(in, edit), 10);
    REQUIRE(paths.size() == 2);
    CHECK(paths[0].output == phones(lex, {"S"}));
    CHECK(paths[0].weight == 0.0);
    CHECK(paths[1].output == phones(lex, {"Z"}));
    CHECK(paths[1].weight == 1.5);
  }

  SUBCASE("S Z input yields the four substitution combinations") {
    SimilarPhonemes sim;
    sim.pairs = {{"S", "Z"}};
    sim.sub_cost = 2.0;
    sim.del_cost = kInfiniteWeight;
    Wfst edit = lex.build_edit_fst(sim);
    Wfst in = linear_acceptor(phones(lex, {"S", "Z"}), lex.phoneme_symbols());
    auto paths = nbest(compose(in, edit), 10);
    REQUIRE(paths.size() == 4);
    std::map<std::vector<SymbolId>, double> got;
    for (const Path& p : paths) got[p.output] = p.weight;
    CHECK(got.at(phones(lex, {"S", "Z"})) == 0.0);
    CHECK(got.at(phones(lex, {"S", "S"})) == 2.0);
    CHECK(got.at(phones(lex, {"Z", "Z"})) == 2.0);
    CHECK(got.at(phones(lex, {"Z", "S"})) == 4.0);
  }

  SUBCASE("deletions drop a phoneme at del_cost") {
    SimilarPhonemes sim;
    sim.del_cost = 4.0;
    Wfst edit = lex.build_edit_fst(sim);
    Wfst in = linear_acceptor(phones(lex, {"S", "IY"}), lex.phoneme_symbols());
    auto paths = nbest(compose(in, edit), 10);
    std::map<std::vector<SymbolId>, double> got;
    for (const Path& p : paths) got[p.output] = p.weight;
    CHECK(got.at(phones(lex, {"S", "IY"})) == 0.0);
    CHECK(got.at(phones(lex, {"S"})) == 4.0);
    CHECK(got.at(phones(lex, {"IY"})) == 4.0);
    CHECK(got.at({}) == 8.0);
  }

  SUBCASE("unknown phoneme in a pair is a configuration error") {
    SimilarPhonemes sim;
    sim.pairs = {{"S", "QQ"}};
    CHECK_THROWS_AS(lex.build_edit_fst(sim), ConfigError);
  }
}

TEST_CASE("encode-decode round trip maps a sentence to itself at cost zero") {
  Lexicon lex = toy_lexicon();
  Wfst w2p = lex.build_word2phone({Lang::kL1, Lang::kL2});
  Wfst round = compose(w2p, invert(w2p));

  for (const auto& sent : std::vector<std::vector<std::string>>{
           {"cat/l1"}, {"see/l1", "tea/l1"}, {"si/l2", "gato/l2", "kit/l1"}}) {
    std::vector<SymbolId> syms;
    for (const auto& w : sent) syms.push_back(lex.word_symbols()->find(w));
    Wfst in = linear_acceptor(syms, lex.word_symbols());
    auto paths = nbest(compose(in, round), 32);
    bool found_self = false;
    for (const Path& p : paths)
      if (p.output == syms && p.weight == 0.0) found_self = true;
    CHECK(found_self);
  }
}
