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

#include "phonorank.h"

#include <cstring>
#include <string>

#include "commands.h"
#include "config.h"
#include "metrics.h"

// The opaque handle is just the C++ config behind a C name.
struct pr_config {
  phonorank::RunConfig impl;
};

namespace {

thread_local std::string t_last_error;

pr_status set_error(pr_status code, const char* what) {
  t_last_error = what;
  return code;
}

// Runs fn, translating the library's exception taxonomy onto status codes.
template <typename Fn>
pr_status guarded(Fn&& fn) {
  try {
    fn();
    t_last_error.clear();
    return PR_OK;
  } catch (const phonorank::ConfigError& e) {
    return set_error(PR_ERR_CONFIG, e.what());
  } catch (const phonorank::NumericError& e) {
    return set_error(PR_ERR_NUMERIC, e.what());
  } catch (const phonorank::DataError& e) {
    return set_error(PR_ERR_DATA, e.what());
  } catch (const std::exception& e) {
    return set_error(PR_ERR_DATA, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(malloc(s.size() + 1));
  if (out != nullptr) memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* pr_version(void) { return "0.1.0"; }

const char* pr_last_error(void) { return t_last_error.c_str(); }

void pr_set_log_level(int level) { phonorank::set_log_level(level); }

pr_config* pr_config_new(void) { return new (std::nothrow) pr_config(); }

pr_config* pr_config_load(const char* path) {
  if (path == nullptr) {
    set_error(PR_ERR_CONFIG, "pr_config_load: path is NULL");
    return nullptr;
  }
  pr_config* cfg = new (std::nothrow) pr_config();
  if (cfg == nullptr) return nullptr;
  pr_status status = guarded([&] { cfg->impl = phonorank::RunConfig::from_file(path); });
  if (status != PR_OK) {
    delete cfg;
    return nullptr;
  }
  return cfg;
}

pr_status pr_config_set(pr_config* cfg, const char* key, const char* value) {
  if (cfg == nullptr || key == nullptr || value == nullptr)
    return set_error(PR_ERR_CONFIG, "pr_config_set: NULL argument");
  return guarded([&] { cfg->impl.set(key, value); });
}

const char* pr_config_get(const pr_config* cfg, const char* key) {
  if (cfg == nullptr || key == nullptr) return nullptr;
  auto it = cfg->impl.entries().find(key);
  return it == cfg->impl.entries().end() ? nullptr : it->second.c_str();
}

void pr_config_free(pr_config* cfg) { delete cfg; }

pr_status pr_prep_corpus(const pr_config* cfg) {
  if (cfg == nullptr) return set_error(PR_ERR_CONFIG, "pr_prep_corpus: config is NULL");
  return guarded([&] { phonorank::cmd_prep_corpus(cfg->impl); });
}

pr_status pr_gen_dataset(const pr_config* cfg) {
  if (cfg == nullptr) return set_error(PR_ERR_CONFIG, "pr_gen_dataset: config is NULL");
  return guarded([&] { phonorank::cmd_gen_dataset(cfg->impl); });
}

pr_status pr_train(const pr_config* cfg) {
  if (cfg == nullptr) return set_error(PR_ERR_CONFIG, "pr_train: config is NULL");
  return guarded([&] { phonorank::cmd_train(cfg->impl); });
}

pr_status pr_evaluate(const pr_config* cfg, char** out_text) {
  if (cfg == nullptr) return set_error(PR_ERR_CONFIG, "pr_evaluate: config is NULL");
  return guarded([&] {
    std::string text = phonorank::cmd_evaluate(cfg->impl);
    if (out_text != nullptr) *out_text = dup_string(text);
  });
}

pr_status pr_report(const pr_config* cfg, const char* const* input_paths, size_t n_inputs,
                    char** out_text) {
  if (cfg == nullptr || (input_paths == nullptr && n_inputs > 0))
    return set_error(PR_ERR_CONFIG, "pr_report: NULL argument");
  return guarded([&] {
    std::vector<std::string> inputs(input_paths, input_paths + n_inputs);
    std::string text = phonorank::cmd_report(inputs, cfg->impl);
    if (out_text != nullptr) *out_text = dup_string(text);
  });
}

void pr_string_free(char* s) { free(s); }

pr_status pr_wer(const char* ref_tokens, const char* hyp_tokens, double* wer_out,
                 int32_t* substitutions, int32_t* deletions, int32_t* insertions) {
  if (ref_tokens == nullptr || hyp_tokens == nullptr)
    return set_error(PR_ERR_CONFIG, "pr_wer: NULL argument");
  return guarded([&] {
    phonorank::WerBreakdown b =
        phonorank::wer(phonorank::split_ws(ref_tokens), phonorank::split_ws(hyp_tokens));
    if (wer_out != nullptr) *wer_out = b.wer;
    if (substitutions != nullptr) *substitutions = b.substitutions;
    if (deletions != nullptr) *deletions = b.deletions;
    if (insertions != nullptr) *insertions = b.insertions;
  });
}

}  // extern "C"
