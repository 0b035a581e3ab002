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

#include "commands.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "altgen.h"
#include "dataset_io.h"
#include "json.hpp"
#include "metrics.h"
#include "models.h"
#include "training.h"

namespace phonorank {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory " + dir + ": " + ec.message());
}

std::string path_join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

std::ifstream open_input(const std::string& path, const std::string& what) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + what + ": " + path);
  return in;
}

void write_tagged_file(const std::string& path, const TaggedCorpus& corpus) {
  std::ostringstream out;
  for (const GoldSentence& s : corpus.sentences) out << s.to_tagged_line() << '\n';
  write_file(path, out.str());
}

TaggedCorpus load_tagged_file(const std::string& path, int max_tokens = 100) {
  std::ifstream in = open_input(path, "tagged corpus");
  LoadOptions opts;
  opts.max_tokens = max_tokens;
  return load_tagged(in, path, opts);
}

std::string file_hash(const std::string& path) { return fnv1a64_hex(read_file(path)); }

// --- prep-corpus --------------------------------------------------------------

Json split_manifest(const SplitResult& split) {
  Json j;
  const char* names[3] = {"train", "dev", "test"};
  for (int p = 0; p < 3; ++p) j[names[p]] = split.indices[static_cast<size_t>(p)];
  return j;
}

}  // namespace

void cmd_prep_corpus(const RunConfig& cfg) {
  std::string out_dir = cfg.require_str("corpus.out_dir");
  ensure_dir(out_dir);
  uint64_t seed = cfg.seed();
  std::array<double, 3> ratios{cfg.get_double("corpus.split_train", 0.6),
                               cfg.get_double("corpus.split_dev", 0.2),
                               cfg.get_double("corpus.split_test", 0.2)};
  LoadOptions load_opts;
  load_opts.max_tokens = static_cast<int>(cfg.get_int("corpus.max_tokens", 100));
  int64_t mono_lines = cfg.get_int("corpus.mono_lines", 0);

  Json stats;
  auto emit_split = [&](const std::string& stem, const TaggedCorpus& corpus) {
    SplitResult split = split_corpus(corpus, ratios, derive_seed(seed, stem));
    const char* names[3] = {"train", "dev", "test"};
    Json counts;
    for (int p = 0; p < 3; ++p) {
      write_tagged_file(path_join(out_dir, stem + "." + names[p] + ".txt"),
                        split.parts[static_cast<size_t>(p)]);
      counts[names[p]] = split.parts[static_cast<size_t>(p)].sentences.size();
    }
    write_file(path_join(out_dir, stem + ".splits.json"), split_manifest(split).dump(2) + "\n");
    counts["total"] = corpus.sentences.size();
    stats[stem] = std::move(counts);
  };

  {
    std::string path = cfg.require_str("corpus.tagged");
    std::ifstream in = open_input(path, "tagged corpus");
    TaggedCorpus cs = load_tagged(in, path, load_opts);
    log_info("loaded %zu tagged sentences from %s", cs.sentences.size(), path.c_str());
    emit_split("cs", cs);
  }
  for (const auto& [key, stem, lang] :
       {std::tuple{"corpus.mono_l1", "mono_l1", Lang::kL1},
        std::tuple{"corpus.mono_l2", "mono_l2", Lang::kL2}}) {
    if (!cfg.has(key)) continue;
    std::string path = cfg.require_str(key);
    std::ifstream in = open_input(path, "monolingual corpus");
    TaggedCorpus mono = load_monolingual(in, lang, path, mono_lines, load_opts);
    log_info("loaded %zu monolingual sentences from %s", mono.sentences.size(), path.c_str());
    emit_split(stem, mono);
  }
  write_file(path_join(out_dir, "prep.stats.json"), stats.dump(2) + "\n");
}

// --- gen-dataset --------------------------------------------------------------

Lexicon build_lexicon_from_config(const RunConfig& cfg) {
  LexiconOptions opts;
  opts.sub_cost = cfg.get_double("lex.sub_cost", 3.0);
  opts.del_cost = cfg.get_double("lex.del_cost", 4.0);
  opts.unigram_scale = cfg.get_double("lex.unigram_scale", 0.1);
  if (cfg.has("lex.filter")) {
    std::set<std::string> filter;
    std::ifstream in = open_input(cfg.require_str("lex.filter"), "filter word list");
    std::string line;
    while (std::getline(in, line)) {
      std::string_view word = trim(line);
      if (!word.empty()) filter.insert(lower_ascii(word));
    }
    opts.filter_words = std::move(filter);
  }

  std::ifstream l1_in = open_input(cfg.require_str("lex.l1_dict"), "L1 pronunciation dictionary");
  LexiconFragment l1 = load_pron_dict(l1_in, Lang::kL1, cfg.require_str("lex.l1_dict"));
  std::ifstream l2_in = open_input(cfg.require_str("lex.l2_dict"), "L2 pronunciation dictionary");
  LexiconFragment l2 = load_pron_dict(l2_in, Lang::kL2, cfg.require_str("lex.l2_dict"));
  if (cfg.has("lex.l2_phoneme_map")) {
    std::ifstream map_in = open_input(cfg.require_str("lex.l2_phoneme_map"), "phoneme map");
    PhonemeMap map = load_phoneme_map(map_in, cfg.require_str("lex.l2_phoneme_map"));
    l2 = apply_phoneme_map(l2, map);
  }

  std::map<std::string, double> uni_l1, uni_l2;
  if (cfg.has("lex.unigrams_l1")) {
    std::ifstream in = open_input(cfg.require_str("lex.unigrams_l1"), "L1 unigrams");
    uni_l1 = load_unigrams(in, cfg.require_str("lex.unigrams_l1"));
  }
  if (cfg.has("lex.unigrams_l2")) {
    std::ifstream in = open_input(cfg.require_str("lex.unigrams_l2"), "L2 unigrams");
    uni_l2 = load_unigrams(in, cfg.require_str("lex.unigrams_l2"));
  }

  Lexicon lex({std::move(l1), std::move(l2)}, std::move(uni_l1), std::move(uni_l2), opts);
  if (cfg.has("lex.similar")) {
    std::ifstream in = open_input(cfg.require_str("lex.similar"), "similar phoneme list");
    lex.set_similar_pairs(load_similar_pairs(in, cfg.require_str("lex.similar")));
  }
  log_info("lexicon: %zu entries, %zu phonemes", lex.num_entries(),
           lex.phoneme_symbols()->size() - 1);
  return lex;
}

namespace {

GenerationConfig generation_config(const RunConfig& cfg) {
  GenerationConfig gen;
  gen.nbest = static_cast<int>(cfg.get_int("gen.nbest", 1000));
  gen.top_k = static_cast<int>(cfg.get_int("gen.top_k", 10));
  gen.min_alternatives = static_cast<int>(cfg.get_int("gen.min_alts", 5));
  gen.min_words = static_cast<int>(cfg.get_int("gen.min_words", 3));
  gen.span_min_frac = cfg.get_double("gen.span_min", 0.3);
  gen.span_max_frac = cfg.get_double("gen.span_max", 0.7);
  gen.weight_cost = cfg.get_double("gen.w_cost", 1.0);
  gen.weight_minority = cfg.get_double("gen.w_minority", 2.0);
  gen.weight_word_len = cfg.get_double("gen.w_len", 0.5);
  gen.max_expansions = static_cast<uint64_t>(cfg.get_int("gen.expansion_cap", 1000000));
  return gen;
}

struct PoolResult {
  std::vector<EvalSet> accepted;
  std::map<std::string, int64_t> rejections;
};

PoolResult collect_sets(const Generator& gen, const std::vector<GoldSentence>& golds,
                        const std::string& prefix, uint64_t seed, int workers) {
  PoolResult out;
  for (BuildOutcome& outcome : build_sets_parallel(gen, golds, prefix, seed, workers)) {
    if (std::holds_alternative<EvalSet>(outcome)) {
      out.accepted.push_back(std::move(std::get<EvalSet>(outcome)));
    } else {
      const Rejection& r = std::get<Rejection>(outcome);
      switch (r.reason) {
        case Rejection::Reason::kTooShort: ++out.rejections["too_short"]; break;
        case Rejection::Reason::kTooFewAlternatives: ++out.rejections["too_few_alternatives"]; break;
        case Rejection::Reason::kOov: ++out.rejections["oov"]; break;
      }
    }
  }
  for (const auto& [reason, count] : out.rejections)
    log_verbose("%s: %lld sentences rejected (%s)", prefix.c_str(),
                static_cast<long long>(count), reason.c_str());
  return out;
}

void write_dataset_with_stats(const std::string& base, const std::vector<EvalSet>& sets) {
  write_dataset(base + ".jsonl", sets);
  write_file(base + ".stats.json", stats_to_json(dataset_stats(sets)));
  log_info("wrote %s.jsonl (%zu sets)", base.c_str(), sets.size());
}

}  // namespace

void cmd_gen_dataset(const RunConfig& cfg) {
  std::string corpus_dir = cfg.require_str("gen.corpus_dir");
  std::string out_dir = cfg.require_str("gen.out_dir");
  ensure_dir(out_dir);
  uint64_t seed = cfg.seed();
  int workers = static_cast<int>(cfg.get_int("gen.workers", 1));

  Lexicon lex = build_lexicon_from_config(cfg);
  GenerationConfig gen_cfg = generation_config(cfg);
  Generator generator(lex, gen_cfg);

  int total_sets = static_cast<int>(cfg.get_int("gen.sets", 1000));
  double cs_fraction = cfg.get_double("gen.cs_fraction", 0.25);
  int cs_count = static_cast<int>(std::lround(total_sets * cs_fraction));
  int mono_count = total_sets - cs_count;

  for (const char* split : {"dev", "test"}) {
    TaggedCorpus corpus =
        load_tagged_file(path_join(corpus_dir, std::string("cs.") + split + ".txt"));
    PoolResult pool = collect_sets(generator, corpus.sentences, split, seed, workers);
    log_info("%s: %zu candidate sets from %zu sentences", split, pool.accepted.size(),
             corpus.sentences.size());
    Rng rng(derive_seed(seed, std::string("assemble_") + split));
    std::vector<EvalSet> picked = assemble_dataset(pool.accepted, cs_count, mono_count, rng);
    write_dataset_with_stats(path_join(out_dir, std::string("dataset.") + split), picked);
  }

  if (cfg.get_bool("gen.train_sets", true)) {
    TaggedCorpus corpus = load_tagged_file(path_join(corpus_dir, "cs.train.txt"));
    int64_t limit = cfg.get_int("gen.train_sets_limit", 0);
    if (limit > 0 && static_cast<int64_t>(corpus.sentences.size()) > limit)
      corpus.sentences.resize(static_cast<size_t>(limit));
    PoolResult pool = collect_sets(generator, corpus.sentences, "train", seed, workers);
    write_dataset_with_stats(path_join(out_dir, "train_sets.cs"), pool.accepted);
  }

  if (cfg.get_bool("gen.mono_sets", false)) {
    GenerationConfig mono_cfg = gen_cfg;
    mono_cfg.require_all_types = cfg.get_bool("gen.mono_require_all_types", true);
    Generator mono_generator(lex, mono_cfg);
    double fraction = cfg.get_double("gen.mono_fraction", 1.0 / 6.0);
    std::vector<EvalSet> sets;
    for (const char* stem : {"mono_l1", "mono_l2"}) {
      std::string path = path_join(corpus_dir, std::string(stem) + ".train.txt");
      if (!fs::exists(path)) throw DataError("gen.mono_sets needs " + path);
      TaggedCorpus corpus = load_tagged_file(path);
      size_t keep = static_cast<size_t>(
          std::lround(static_cast<double>(corpus.sentences.size()) * fraction));
      corpus.sentences.resize(std::min(corpus.sentences.size(), keep));
      PoolResult pool = collect_sets(mono_generator, corpus.sentences, stem, seed, workers);
      for (EvalSet& s : pool.accepted) sets.push_back(std::move(s));
    }
    write_dataset_with_stats(path_join(out_dir, "train_sets.mono"), sets);
  }
}

// --- train --------------------------------------------------------------------

namespace {

TaggedCorpus sets_to_corpus(const std::vector<EvalSet>& sets) {
  TaggedCorpus corpus;
  for (const EvalSet& set : sets) {
    corpus.sentences.push_back(set.gold);
    for (AltType type : {AltType::kCs, AltType::kL1, AltType::kL2})
      for (const Alternative& alt : set.alts_for(type))
        corpus.sentences.push_back(GoldSentence{alt.tokens});
  }
  return corpus;
}

std::vector<std::vector<int32_t>> encode_corpus(const TaggedCorpus& corpus,
                                                const Vocabulary& vocab) {
  std::vector<std::vector<int32_t>> out;
  out.reserve(corpus.sentences.size());
  for (const GoldSentence& s : corpus.sentences) out.push_back(vocab.encode(s));
  return out;
}

// Deterministic fraction cut, identical across protocols for a given seed.
template <typename T>
void cut_fraction(std::vector<T>& items, double fraction, uint64_t seed) {
  if (fraction >= 1.0) return;
  size_t keep = static_cast<size_t>(std::lround(static_cast<double>(items.size()) * fraction));
  std::vector<size_t> order(items.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(derive_seed(seed, "cs_cut"));
  rng.shuffle(order);
  order.resize(keep);
  std::sort(order.begin(), order.end());
  std::vector<T> kept;
  kept.reserve(keep);
  for (size_t i : order) kept.push_back(std::move(items[i]));
  items = std::move(kept);
}

Json epochs_to_json(const TrainResult& result) {
  Json arr = Json::array();
  for (const EpochRecord& e : result.epochs)
    arr.push_back(Json{{"epoch", e.epoch},
                       {"lr", e.lr},
                       {"train_loss", e.train_loss},
                       {"dev_metric", e.dev_metric},
                       {"improved", e.improved}});
  return arr;
}

Json phase_to_json(const std::string& name, const TrainResult& result) {
  Json j;
  j["name"] = name;
  j["epochs"] = epochs_to_json(result);
  j["best_epoch"] = result.best_epoch;
  j["best_metric"] = result.best_metric;
  j["stopped_by_lr_floor"] = result.stopped_by_lr_floor;
  Json access;
  for (const auto& [source, count] : result.access_counts) access[source] = count;
  j["data_access"] = std::move(access);
  return j;
}

}  // namespace

void cmd_train(const RunConfig& cfg) {
  Protocol protocol = parse_protocol(cfg.require_str("train.protocol"));
  bool is_disc = protocol_is_disc(protocol);
  std::string out_dir = cfg.require_str("train.out_dir");
  ensure_dir(out_dir);
  uint64_t seed = cfg.seed();
  std::string run_name = cfg.get_str("train.run_name", protocol_name(protocol));

  TrainConfig tc;
  tc.lr = cfg.get_double("train.lr", is_disc ? 1.0 : 10.0);
  tc.lr_decay = cfg.get_double("train.lr_decay", 2.5);
  tc.lr_floor = cfg.get_double("train.lr_floor", 1e-4);
  tc.clip = cfg.get_double("train.clip", 1.0);
  tc.clip_by_value = cfg.get_str("train.clip_mode", "norm") == "value";
  tc.weight_decay = cfg.get_double("train.weight_decay", is_disc ? 0.0 : 1e-5);
  tc.batch_size = static_cast<int>(cfg.get_int("train.batch", 20));
  tc.max_epochs = static_cast<int>(cfg.get_int("train.max_epochs", 40));
  tc.seed = seed;
  int pretrain_epochs = static_cast<int>(cfg.get_int("train.pretrain_epochs", tc.max_epochs));

  ModelConfig mc;
  mc.emb_dim = static_cast<int>(cfg.get_int("train.emb_dim", 300));
  mc.hidden_dim = static_cast<int>(cfg.get_int("train.hidden_dim", 650));
  mc.word_dropout = cfg.get_double("train.word_dropout", 0.2);
  mc.dropout = cfg.get_double("train.dropout", 0.35);

  double cs_fraction = cfg.get_double("train.cs_fraction", 1.0);
  std::string corpus_dir = cfg.require_str("train.corpus_dir");
  std::map<std::string, std::string> hashes;
  auto tagged = [&](const std::string& stem) {
    std::string path = path_join(corpus_dir, stem + ".txt");
    hashes[path] = file_hash(path);
    return load_tagged_file(path);
  };

  bool needs_mono_text = protocol == Protocol::kL1OnlyLm || protocol == Protocol::kL2OnlyLm ||
                         protocol == Protocol::kAllShuffledLm ||
                         protocol == Protocol::kAllCsLastLm || protocol == Protocol::kFineTunedLm;

  TaggedCorpus cs_train = tagged("cs.train");
  TaggedCorpus cs_dev = tagged("cs.dev");
  TaggedCorpus cs_test = tagged("cs.test");
  cut_fraction(cs_train.sentences, cs_fraction, seed);

  TaggedCorpus mono_l1, mono_l2;
  if (needs_mono_text || cfg.get_bool("train.extend_vocab_mono", false)) {
    mono_l1 = tagged("mono_l1.train");
    mono_l2 = tagged("mono_l2.train");
  }

  // Evaluation datasets contribute (frozen) vocabulary so every sentence
  // they contain stays scorable.
  std::vector<EvalSet> dataset_dev, dataset_test;
  TaggedCorpus dev_sets_corpus, test_sets_corpus;
  if (cfg.has("train.dataset_dev")) {
    std::string path = cfg.require_str("train.dataset_dev");
    hashes[path] = file_hash(path);
    dataset_dev = read_dataset(path);
    dev_sets_corpus = sets_to_corpus(dataset_dev);
  }
  if (cfg.has("train.dataset_test")) {
    std::string path = cfg.require_str("train.dataset_test");
    hashes[path] = file_hash(path);
    dataset_test = read_dataset(path);
    test_sets_corpus = sets_to_corpus(dataset_test);
  }

  std::vector<EvalSet> sets_cs, sets_mono;
  TaggedCorpus sets_cs_corpus, sets_mono_corpus;
  if (is_disc) {
    std::string path = cfg.require_str("train.sets_cs");
    hashes[path] = file_hash(path);
    sets_cs = read_dataset(path);
    cut_fraction(sets_cs, cs_fraction, seed);
    sets_cs_corpus = sets_to_corpus(sets_cs);
    if (protocol == Protocol::kFineTunedDisc) {
      std::string mono_path = cfg.require_str("train.sets_mono");
      hashes[mono_path] = file_hash(mono_path);
      sets_mono = read_dataset(mono_path);
      sets_mono_corpus = sets_to_corpus(sets_mono);
    }
    if (dataset_dev.empty())
      throw ConfigError("discriminative training needs train.dataset_dev for the dev metric");
  }

  // Trainable vocabulary comes from the protocol's own training data.
  std::vector<const TaggedCorpus*> trainable, frozen;
  switch (protocol) {
    case Protocol::kL1OnlyLm: trainable = {&mono_l1}; break;
    case Protocol::kL2OnlyLm: trainable = {&mono_l2}; break;
    case Protocol::kAllShuffledLm:
    case Protocol::kAllCsLastLm:
    case Protocol::kFineTunedLm: trainable = {&mono_l1, &mono_l2, &cs_train}; break;
    case Protocol::kCsOnlyLm: trainable = {&cs_train}; break;
    case Protocol::kCsOnlyDisc: trainable = {&sets_cs_corpus}; break;
    case Protocol::kFineTunedDisc: trainable = {&sets_mono_corpus, &sets_cs_corpus}; break;
  }
  frozen = {&cs_dev, &cs_test, &dev_sets_corpus, &test_sets_corpus};
  if (cfg.get_bool("train.extend_vocab_mono", false)) {
    frozen.push_back(&mono_l1);
    frozen.push_back(&mono_l2);
  }
  Vocabulary vocab = build_vocab(trainable, frozen);
  int trainable_tokens = 0;
  for (int32_t i = 0; i < vocab.size(); ++i) trainable_tokens += vocab.trainable(i) ? 1 : 0;
  log_info("vocabulary: %d tokens, %d trainable", vocab.size(), trainable_tokens);

  Json phases = Json::array();
  std::string checkpoint_path = path_join(out_dir, run_name + ".ckpt");
  std::string metric_kind;
  double best_dev_metric = 0.0;

  if (!is_disc) {
    metric_kind = "perplexity";
    LmModel model(vocab, mc, seed);
    std::vector<std::vector<int32_t>> dev = encode_corpus(cs_dev, vocab);

    auto source_of = [&](const char* name, const TaggedCorpus& corpus, bool is_cs) {
      LmDataSource src;
      src.name = name;
      src.is_cs = is_cs;
      src.sentences = encode_corpus(corpus, vocab);
      return src;
    };

    if (protocol == Protocol::kFineTunedLm) {
      TrainConfig pre = tc;
      pre.max_epochs = pretrain_epochs;
      TrainResult pretrain = train_lm(
          model, {source_of("mono_l1", mono_l1, false), source_of("mono_l2", mono_l2, false)},
          ArrangeMode::kShuffledUnion, dev, pre);
      phases.push_back(phase_to_json("pretrain", pretrain));
      TrainResult finetune = train_lm(model, {source_of("cs", cs_train, true)},
                                      ArrangeMode::kShuffledUnion, dev, tc);
      phases.push_back(phase_to_json("finetune", finetune));
      best_dev_metric = finetune.best_epoch > 0 ? finetune.best_metric : pretrain.best_metric;
    } else {
      std::vector<LmDataSource> sources;
      ArrangeMode mode = ArrangeMode::kShuffledUnion;
      switch (protocol) {
        case Protocol::kL1OnlyLm: sources.push_back(source_of("mono_l1", mono_l1, false)); break;
        case Protocol::kL2OnlyLm: sources.push_back(source_of("mono_l2", mono_l2, false)); break;
        case Protocol::kCsOnlyLm: sources.push_back(source_of("cs", cs_train, true)); break;
        case Protocol::kAllShuffledLm:
        case Protocol::kAllCsLastLm:
          sources.push_back(source_of("mono_l1", mono_l1, false));
          sources.push_back(source_of("mono_l2", mono_l2, false));
          sources.push_back(source_of("cs", cs_train, true));
          if (protocol == Protocol::kAllCsLastLm) mode = ArrangeMode::kMonoThenCs;
          break;
        default: break;
      }
      TrainResult result = train_lm(model, sources, mode, dev, tc);
      phases.push_back(phase_to_json("train", result));
      best_dev_metric = result.best_metric;
    }
    save_checkpoint(checkpoint_path, "lm", mc, vocab, std::as_const(model).params());
  } else {
    metric_kind = "accuracy";
    ReprKind repr = parse_repr_kind(cfg.get_str("train.repr", "bilstm"));
    RankerModel model(vocab, mc, repr, seed);

    auto to_sets = [&](const std::vector<EvalSet>& sets, const std::string& source) {
      std::vector<DiscSet> out;
      for (const EvalSet& s : sets) {
        auto d = to_disc_set(s, vocab, source);
        if (d.has_value()) out.push_back(std::move(*d));
      }
      return out;
    };
    std::vector<DiscSet> dev = to_sets(dataset_dev, "dataset_dev");
    std::vector<DiscSet> train_cs = to_sets(sets_cs, "cs_sets");

    if (protocol == Protocol::kFineTunedDisc) {
      TrainConfig pre = tc;
      pre.max_epochs = pretrain_epochs;
      TrainResult pretrain = train_disc(model, to_sets(sets_mono, "mono_sets"), dev, pre);
      phases.push_back(phase_to_json("pretrain", pretrain));
      TrainResult finetune = train_disc(model, train_cs, dev, tc);
      phases.push_back(phase_to_json("finetune", finetune));
      best_dev_metric = finetune.best_epoch > 0 ? finetune.best_metric : pretrain.best_metric;
    } else {
      TrainResult result = train_disc(model, train_cs, dev, tc);
      phases.push_back(phase_to_json("train", result));
      best_dev_metric = result.best_metric;
    }
    save_checkpoint(checkpoint_path,
                    repr == ReprKind::kBiLstm ? "ranker_bilstm" : "ranker_bow", mc, vocab,
                    std::as_const(model).params());
  }

  Json manifest;
  manifest["kind"] = "run_manifest";
  manifest["tool"] = "phonorank 0.1.0";
  manifest["protocol"] = protocol_name(protocol);
  manifest["run_name"] = run_name;
  manifest["seed"] = seed;
  Json config_json;
  for (const auto& [key, value] : cfg.entries()) config_json[key] = value;
  manifest["config"] = std::move(config_json);
  Json hash_json;
  for (const auto& [path, hash] : hashes) hash_json[path] = hash;
  manifest["data_hashes"] = std::move(hash_json);
  manifest["vocab_size"] = vocab.size();
  manifest["trainable_tokens"] = trainable_tokens;
  manifest["dev_metric_kind"] = metric_kind;
  manifest["best_dev_metric"] = best_dev_metric;
  manifest["phases"] = std::move(phases);
  manifest["checkpoint"] = checkpoint_path;
  write_file(path_join(out_dir, run_name + ".manifest.json"), manifest.dump(2) + "\n");
  log_info("wrote %s and its manifest", checkpoint_path.c_str());
}

// --- evaluate -----------------------------------------------------------------

std::string cmd_evaluate(const RunConfig& cfg) {
  std::string ckpt_path = cfg.require_str("eval.checkpoint");
  std::string dataset_path = cfg.require_str("eval.dataset");
  Checkpoint ckpt = load_checkpoint(ckpt_path);
  std::vector<EvalSet> sets = read_dataset(dataset_path);

  std::optional<LmModel> lm;
  std::optional<RankerModel> ranker;
  if (ckpt.model_kind == "lm")
    lm.emplace(lm_from_checkpoint(ckpt));
  else
    ranker.emplace(ranker_from_checkpoint(ckpt));
  const Vocabulary& vocab = ckpt.vocab;

  auto encode = [&](const std::vector<TaggedToken>& tokens) {
    std::vector<int32_t> ids;
    for (const TaggedToken& t : tokens) {
      if (!t.is_word()) continue;
      int32_t id = vocab.find(t.surface);
      if (id < 0)
        throw DataError("dataset token '" + t.surface +
                        "' is not covered by the checkpoint vocabulary (incompatible "
                        "checkpoint for this dataset)");
      ids.push_back(id);
    }
    return ids;
  };
  auto score = [&](const std::vector<int32_t>& ids) {
    return lm.has_value() ? lm->sentence_logprob(ids) : ranker->score(ids);
  };

  std::vector<SetRanking> rankings;
  PerplexityAccumulator ppl;
  constexpr double kLn2 = 0.6931471805599453;
  for (const EvalSet& set : sets) {
    SetRanking r;
    std::vector<int32_t> gold_ids = encode(set.gold.tokens);
    r.gold_score = score(gold_ids);
    r.gold_tokens = set.gold.word_surfaces();
    r.gold_is_cs = set.gold.kind() == SentenceKind::kCs;
    for (AltType type : {AltType::kCs, AltType::kL1, AltType::kL2}) {
      for (const Alternative& alt : set.alts_for(type)) {
        std::vector<int32_t> ids = encode(alt.tokens);
        if (ids.empty()) continue;
        r.alt_scores.push_back(score(ids));
        r.alt_tokens.push_back(alt.word_surfaces());
      }
    }
    if (lm.has_value())
      for (double lp : lm->logprobs(gold_ids, false, nullptr)) ppl.add_log2(lp / kLn2);
    rankings.push_back(std::move(r));
  }

  std::optional<double> perplexity;
  if (lm.has_value()) perplexity = ppl.perplexity();
  EvalReport report = make_report(rankings, perplexity);
  std::string text = report_to_text(report);

  std::string split = cfg.get_str("eval.split", "");
  if (split.empty()) {
    if (dataset_path.find("dev") != std::string::npos)
      split = "dev";
    else
      split = "test";
  }
  std::string label = cfg.get_str("eval.label", "");
  if (label.empty()) label = fs::path(ckpt_path).stem().string();

  Json j;
  j["kind"] = "eval_report";
  j["label"] = label;
  j["split"] = split;
  j["model_kind"] = ckpt.model_kind;
  j["checkpoint"] = ckpt_path;
  j["dataset"] = dataset_path;
  j["report"] = Json::parse(report_to_json(report));

  if (cfg.has("eval.out_prefix")) {
    std::string prefix = cfg.require_str("eval.out_prefix");
    if (fs::path(prefix).has_parent_path()) ensure_dir(fs::path(prefix).parent_path().string());
    write_file(prefix + ".json", j.dump(2) + "\n");
    write_file(prefix + ".txt", text);
  }
  return text;
}

// --- report -------------------------------------------------------------------

namespace {

struct ReportRow {
  std::string name;
  std::map<std::string, Json> dev;   // perplexity / accuracy / wer
  std::map<std::string, Json> test;
};

void fold_eval_report(const Json& j, std::map<std::string, ReportRow>& rows) {
  std::string name = j.at("label").get<std::string>();
  std::string split = j.at("split").get<std::string>();
  const Json& rep = j.at("report");
  auto& row = rows[name];
  row.name = name;
  auto& cell = split == "dev" ? row.dev : row.test;
  cell["perplexity"] = rep.at("perplexity");
  cell["accuracy"] = rep.at("accuracy");
  cell["wer"] = rep.at("wer");
}

void fold_manifest(const Json& j, std::map<std::string, ReportRow>& rows) {
  std::string name = j.at("run_name").get<std::string>();
  auto& row = rows[name];
  row.name = name;
  // A manifest contributes the dev metric its schedule tracked, without
  // overriding numbers that came from an evaluation report.
  std::string kind = j.at("dev_metric_kind").get<std::string>();
  if (!row.dev.count(kind)) row.dev[kind] = j.at("best_dev_metric");
}

}  // namespace

std::string report_json_from_files(const std::vector<std::string>& inputs) {
  if (inputs.empty()) throw ConfigError("report: no input files given");
  std::map<std::string, ReportRow> rows;
  for (const std::string& path : inputs) {
    Json j;
    try {
      j = Json::parse(read_file(path));
    } catch (const std::exception& e) {
      throw DataError("cannot parse " + path + ": " + e.what());
    }
    std::string kind = j.value("kind", "");
    if (kind == "eval_report")
      fold_eval_report(j, rows);
    else if (kind == "run_manifest")
      fold_manifest(j, rows);
    else
      throw DataError(path + ": not a run manifest or evaluation report");
  }

  // Rows with a test accuracy sort first, descending; the rest follow by
  // name so the order is total and documented.
  std::vector<const ReportRow*> ordered;
  for (const auto& [name, row] : rows) ordered.push_back(&row);
  auto test_acc = [](const ReportRow* r) {
    auto it = r->test.find("accuracy");
    if (it == r->test.end() || it->second.is_null()) return -1.0;
    return it->second.get<double>();
  };
  std::sort(ordered.begin(), ordered.end(), [&](const ReportRow* a, const ReportRow* b) {
    double ta = test_acc(a), tb = test_acc(b);
    if (ta != tb) return ta > tb;
    return a->name < b->name;
  });

  Json out;
  out["kind"] = "report";
  Json rows_json = Json::array();
  for (const ReportRow* row : ordered) {
    Json r;
    r["name"] = row->name;
    Json dev, test;
    for (const char* key : {"perplexity", "accuracy", "wer"}) {
      dev[key] = row->dev.count(key) ? row->dev.at(key) : Json(nullptr);
      test[key] = row->test.count(key) ? row->test.at(key) : Json(nullptr);
    }
    r["dev"] = std::move(dev);
    r["test"] = std::move(test);
    rows_json.push_back(std::move(r));
  }
  out["rows"] = std::move(rows_json);
  return out.dump(2) + "\n";
}

std::string report_text_from_json(const std::string& report_json) {
  Json j = Json::parse(report_json);
  std::ostringstream out;
  char line[256];
  snprintf(line, sizeof(line), "%-24s %10s %8s %8s %10s %8s %8s\n", "model", "dev perp",
           "dev acc", "dev wer", "test perp", "test acc", "test wer");
  out << line;
  auto cell = [](const Json& v) {
    char buf[32];
    if (v.is_null())
      snprintf(buf, sizeof(buf), "%s", "--");
    else
      snprintf(buf, sizeof(buf), "%.2f", v.get<double>());
    return std::string(buf);
  };
  for (const Json& row : j.at("rows")) {
    snprintf(line, sizeof(line), "%-24s %10s %8s %8s %10s %8s %8s\n",
             row.at("name").get<std::string>().c_str(), cell(row.at("dev").at("perplexity")).c_str(),
             cell(row.at("dev").at("accuracy")).c_str(), cell(row.at("dev").at("wer")).c_str(),
             cell(row.at("test").at("perplexity")).c_str(), cell(row.at("test").at("accuracy")).c_str(),
             cell(row.at("test").at("wer")).c_str());
    out << line;
  }
  return out.str();
}

std::string cmd_report(const std::vector<std::string>& inputs, const RunConfig& cfg) {
  std::string json = report_json_from_files(inputs);
  std::string text = report_text_from_json(json);
  if (cfg.has("report.json_out")) write_file(cfg.require_str("report.json_out"), json);
  if (cfg.has("report.text_out")) write_file(cfg.require_str("report.text_out"), text);
  return text;
}

}  // namespace phonorank
