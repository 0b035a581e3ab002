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

// Command-line front end. Everything goes through the public C API of
// libphonorank; this binary only parses arguments and moves strings.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "phonorank.h"

namespace {

struct ConfigDeleter {
  void operator()(pr_config* c) const { pr_config_free(c); }
};
using ConfigPtr = std::unique_ptr<pr_config, ConfigDeleter>;

int fail(pr_status status) {
  fprintf(stderr, "phonorank: error: %s\n", pr_last_error());
  return static_cast<int>(status);
}

// Builds the config from --config, convenience flags and trailing
// --key value / --key=value overrides.
int build_config(const std::string& config_path,
                 const std::vector<std::pair<std::string, std::string>>& presets,
                 const std::vector<std::string>& extras, ConfigPtr& out) {
  pr_config* cfg = config_path.empty() ? pr_config_new() : pr_config_load(config_path.c_str());
  if (cfg == nullptr) {
    fprintf(stderr, "phonorank: error: %s\n", pr_last_error());
    return 1;
  }
  out.reset(cfg);

  for (const auto& [key, value] : presets) {
    if (value.empty()) continue;
    if (pr_status s = pr_config_set(cfg, key.c_str(), value.c_str()); s != PR_OK) return fail(s);
  }

  for (size_t i = 0; i < extras.size(); ++i) {
    std::string arg = extras[i];
    if (arg.rfind("--", 0) != 0) {
      fprintf(stderr, "phonorank: error: unexpected argument '%s' (overrides are --key value)\n",
              arg.c_str());
      return 1;
    }
    arg = arg.substr(2);
    std::string value;
    size_t eq = arg.find('=');
    if (eq != std::string::npos) {
      value = arg.substr(eq + 1);
      arg = arg.substr(0, eq);
    } else {
      if (i + 1 >= extras.size()) {
        fprintf(stderr, "phonorank: error: option '--%s' is missing a value\n", arg.c_str());
        return 1;
      }
      value = extras[++i];
    }
    if (pr_status s = pr_config_set(cfg, arg.c_str(), value.c_str()); s != PR_OK) return fail(s);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phonorank: phonetically-confusable sentence sets and ranking models "
               "for code-switched language modeling"};
  app.require_subcommand(1);
  app.footer("Any configuration key can be overridden with --key value, e.g. --gen.nbest 500.");

  bool quiet = false, verbose = false;
  app.add_flag("-q,--quiet", quiet, "only warnings on stderr");
  app.add_flag("-v,--verbose", verbose, "chatty progress output");

  struct Common {
    std::string config;
    std::string seed;
  };
  auto add_common = [&](CLI::App* cmd, Common& common) {
    cmd->add_option("-c,--config", common.config, "configuration file (INI)");
    cmd->add_option("--seed", common.seed, "run seed (also PHONORANK_SEED)");
    cmd->allow_extras();
  };

  Common prep_common;
  std::string prep_tagged, prep_mono_l1, prep_mono_l2, prep_out;
  CLI::App* prep = app.add_subcommand("prep-corpus", "clean and split the corpora");
  add_common(prep, prep_common);
  prep->add_option("--tagged", prep_tagged, "tagged code-switched corpus (surface/lang lines)");
  prep->add_option("--mono-l1", prep_mono_l1, "monolingual L1 text");
  prep->add_option("--mono-l2", prep_mono_l2, "monolingual L2 text");
  prep->add_option("-o,--out", prep_out, "output directory");

  Common gen_common;
  std::string gen_corpus_dir, gen_out, gen_workers;
  CLI::App* gen = app.add_subcommand("gen-dataset", "generate alternative-sentence datasets");
  add_common(gen, gen_common);
  gen->add_option("--corpus-dir", gen_corpus_dir, "prep-corpus output directory");
  gen->add_option("-o,--out", gen_out, "output directory");
  gen->add_option("-j,--workers", gen_workers,
                  "worker threads (output is identical for any count)");

  Common train_common;
  std::string train_protocol, train_corpus_dir, train_out;
  CLI::App* train = app.add_subcommand("train", "train one protocol");
  add_common(train, train_common);
  train->add_option("--protocol", train_protocol,
                    "l1_only_lm | l2_only_lm | all_shuffled_lm | all_cs_last_lm | cs_only_lm | "
                    "fine_tuned_lm | cs_only_disc | fine_tuned_disc");
  train->add_option("--corpus-dir", train_corpus_dir, "prep-corpus output directory");
  train->add_option("-o,--out", train_out, "output directory");

  Common eval_common;
  std::string eval_checkpoint, eval_dataset, eval_out_prefix;
  CLI::App* evaluate = app.add_subcommand("evaluate", "score a dataset with a checkpoint");
  add_common(evaluate, eval_common);
  evaluate->add_option("--checkpoint", eval_checkpoint, "model checkpoint");
  evaluate->add_option("--dataset", eval_dataset, "dataset JSONL");
  evaluate->add_option("-o,--out-prefix", eval_out_prefix, "write <prefix>.json and <prefix>.txt");

  Common report_common;
  std::vector<std::string> report_inputs;
  std::string report_json_out, report_text_out;
  CLI::App* report = app.add_subcommand("report", "comparison table from manifests and reports");
  add_common(report, report_common);
  report->add_option("inputs", report_inputs, "run manifests and/or evaluation reports");
  report->add_option("--json-out", report_json_out, "write the table as JSON");
  report->add_option("--text-out", report_text_out, "write the text table");

  CLI11_PARSE(app, argc, argv);

  pr_set_log_level(quiet ? 0 : (verbose ? 2 : 1));

  ConfigPtr cfg;
  pr_status status = PR_OK;
  char* text = nullptr;

  if (prep->parsed()) {
    if (int rc = build_config(prep_common.config,
                              {{"seed", prep_common.seed},
                               {"corpus.tagged", prep_tagged},
                               {"corpus.mono_l1", prep_mono_l1},
                               {"corpus.mono_l2", prep_mono_l2},
                               {"corpus.out_dir", prep_out}},
                              prep->remaining(), cfg))
      return rc;
    status = pr_prep_corpus(cfg.get());
  } else if (gen->parsed()) {
    if (int rc = build_config(gen_common.config,
                              {{"seed", gen_common.seed},
                               {"gen.corpus_dir", gen_corpus_dir},
                               {"gen.out_dir", gen_out},
                               {"gen.workers", gen_workers}},
                              gen->remaining(), cfg))
      return rc;
    status = pr_gen_dataset(cfg.get());
  } else if (train->parsed()) {
    if (int rc = build_config(train_common.config,
                              {{"seed", train_common.seed},
                               {"train.protocol", train_protocol},
                               {"train.corpus_dir", train_corpus_dir},
                               {"train.out_dir", train_out}},
                              train->remaining(), cfg))
      return rc;
    status = pr_train(cfg.get());
  } else if (evaluate->parsed()) {
    if (int rc = build_config(eval_common.config,
                              {{"seed", eval_common.seed},
                               {"eval.checkpoint", eval_checkpoint},
                               {"eval.dataset", eval_dataset},
                               {"eval.out_prefix", eval_out_prefix}},
                              evaluate->remaining(), cfg))
      return rc;
    status = pr_evaluate(cfg.get(), &text);
  } else if (report->parsed()) {
    if (int rc = build_config(report_common.config,
                              {{"seed", report_common.seed},
                               {"report.json_out", report_json_out},
                               {"report.text_out", report_text_out}},
                              report->remaining(), cfg))
      return rc;
    std::vector<const char*> paths;
    for (const std::string& p : report_inputs) paths.push_back(p.c_str());
    status = pr_report(cfg.get(), paths.data(), paths.size(), &text);
  }

  if (status != PR_OK) return fail(status);
  if (text != nullptr) {
    fputs(text, stdout);
    pr_string_free(text);
  }
  return 0;
}
