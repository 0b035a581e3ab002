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

#ifndef PHONORANK_SRC_CONFIG_H_
#define PHONORANK_SRC_CONFIG_H_

#include <cstdint>
#include <map>
#include <string>

#include "common.h"

namespace phonorank {

// Run configuration: a validated flat key-value store. Keys live in a fixed
// registry (typo on a key name is a ConfigError, not a silent default), and
// every value is a string until a typed getter parses it. Loadable from an
// INI-style file ([section] headers prefix keys with "section."), and every
// key can be overridden individually, which is what the CLI's --key value
// flags do.
class RunConfig {
 public:
  RunConfig() = default;
  static RunConfig from_file(const std::string& path);

  void set(const std::string& key, const std::string& value);  // validates the key
  bool has(const std::string& key) const;

  std::string get_str(const std::string& key, const std::string& fallback) const;
  std::string require_str(const std::string& key) const;
  int64_t get_int(const std::string& key, int64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Seed resolution order: `seed` key, PHONORANK_SEED environment variable,
  // then 1.
  uint64_t seed() const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace phonorank

#endif  // PHONORANK_SRC_CONFIG_H_
