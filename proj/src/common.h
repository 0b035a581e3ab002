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

#ifndef PHONORANK_SRC_COMMON_H_
#define PHONORANK_SRC_COMMON_H_

#include <cstdarg>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace phonorank {

// Error categories map 1:1 onto CLI exit codes / C API status codes:
// config = 1, data = 2, numeric = 3.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Logging to stderr. Level 0 = quiet (warnings only), 1 = normal, 2 = verbose.
void set_log_level(int level);
int log_level();
void log_warn(const char* fmt, ...);
void log_info(const char* fmt, ...);
void log_verbose(const char* fmt, ...);

// --- small string helpers ---------------------------------------------------

// Splits on runs of whitespace; no empty fields.
std::vector<std::string> split_ws(std::string_view s);
std::vector<std::string> split_char(std::string_view s, char sep);
std::string_view trim(std::string_view s);
// ASCII-only lowercasing; bytes >= 0x80 pass through untouched so UTF-8
// accented characters are not mangled.
std::string lower_ascii(std::string_view s);
bool starts_with(std::string_view s, std::string_view prefix);

std::string read_file(const std::string& path);  // DataError if unreadable
void write_file(const std::string& path, std::string_view content);

// --- hashing / deterministic RNG --------------------------------------------

uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);
uint64_t splitmix64(uint64_t x);

// Derives an independent stream seed from a run seed and a tag, so that
// e.g. every sentence id gets its own generator and results do not depend
// on worker scheduling.
uint64_t derive_seed(uint64_t seed, std::string_view tag);

// Deterministic RNG. A splitmix64 stream with hand-rolled distribution
// mappings, so generated sequences are identical across platforms and
// standard libraries (std::uniform_*_distribution would not be).
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(splitmix64(seed)) {}

  uint64_t next_u64();
  // Uniform in [0, 1), 53-bit resolution.
  double next_double();
  // Uniform in [0, n); n > 0. Unbiased via rejection.
  uint64_t below(uint64_t n);
  // Uniform integer in [lo, hi] inclusive.
  int64_t int_in(int64_t lo, int64_t hi);
  // Uniform in [lo, hi).
  double double_in(double lo, double hi);
  bool bernoulli(double p);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  uint64_t state_;
};

}  // namespace phonorank

#endif  // PHONORANK_SRC_COMMON_H_
