/* Copyright 2026 The Phonorank Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the phonorank shared library.
 *
 * Clients hold opaque handles and check integer status codes; the last
 * failure's message is retrievable per thread via pr_last_error(). All
 * strings are UTF-8. Functions returning pr_status return PR_OK on
 * success.
 */

#ifndef PHONORANK_H_
#define PHONORANK_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PR_API __declspec(dllexport)
#else
#define PR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pr_status {
  PR_OK = 0,
  PR_ERR_CONFIG = 1,  /* bad usage, unknown key, missing resource name */
  PR_ERR_DATA = 2,    /* unreadable or malformed input data */
  PR_ERR_NUMERIC = 3, /* numeric failure (non-finite gradients, ...) */
} pr_status;

/* Library version string, e.g. "0.1.0". */
PR_API const char* pr_version(void);

/* Message of the calling thread's most recent failure; empty string when
 * the last call succeeded. The pointer stays valid until the next API call
 * on the same thread. */
PR_API const char* pr_last_error(void);

/* 0 = quiet (warnings only), 1 = normal, 2 = verbose. Logging goes to
 * stderr. */
PR_API void pr_set_log_level(int level);

/* --- configuration ------------------------------------------------------- */

typedef struct pr_config pr_config;

PR_API pr_config* pr_config_new(void);
/* NULL on failure (see pr_last_error). INI format, [section] headers
 * prefix keys with "section.". */
PR_API pr_config* pr_config_load(const char* path);
PR_API pr_status pr_config_set(pr_config* cfg, const char* key, const char* value);
/* NULL when the key is unset. The pointer is valid until the config is
 * modified or freed. */
PR_API const char* pr_config_get(const pr_config* cfg, const char* key);
PR_API void pr_config_free(pr_config* cfg);

/* --- pipeline commands ----------------------------------------------------
 * Each command reads its inputs and writes its outputs per the config keys
 * documented in the project README. */

PR_API pr_status pr_prep_corpus(const pr_config* cfg);
PR_API pr_status pr_gen_dataset(const pr_config* cfg);
PR_API pr_status pr_train(const pr_config* cfg);

/* On success and when out_text is non-NULL, *out_text holds the rendered
 * text report; free it with pr_string_free. */
PR_API pr_status pr_evaluate(const pr_config* cfg, char** out_text);
PR_API pr_status pr_report(const pr_config* cfg, const char* const* input_paths, size_t n_inputs,
                           char** out_text);

PR_API void pr_string_free(char* s);

/* --- direct utilities ------------------------------------------------------ */

/* Word error rate of hyp against ref, both whitespace-separated token
 * strings. Any output pointer may be NULL. */
PR_API pr_status pr_wer(const char* ref_tokens, const char* hyp_tokens, double* wer,
                        int32_t* substitutions, int32_t* deletions, int32_t* insertions);

#ifdef __cplusplus
}
#endif

#endif /* PHONORANK_H_ */
