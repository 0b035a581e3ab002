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

#ifndef PHONORANK_SRC_DATASET_IO_H_
#define PHONORANK_SRC_DATASET_IO_H_

#include <string>
#include <vector>

#include "altgen.h"

namespace phonorank {

// Datasets are UTF-8 JSON-lines files, one self-contained set per line:
//   {"id":..., "gold":{"tokens":[{"w":...,"lang":...}]}, "gold_kind":...,
//    "alts":{"cs":[...], "l1":[...], "l2":[...]}}
// Serialization is byte-deterministic, so regeneration under a fixed seed
// can be diffed directly.

std::string eval_set_to_json_line(const EvalSet& set);
EvalSet eval_set_from_json_line(const std::string& line);

void write_dataset(const std::string& path, const std::vector<EvalSet>& sets);
std::vector<EvalSet> read_dataset(const std::string& path);

struct DatasetStats {
  int64_t sets = 0;
  int64_t sentences = 0;  // golds plus all alternatives
  int64_t alts_cs = 0;
  int64_t alts_l1 = 0;
  int64_t alts_l2 = 0;
  int64_t cs_gold = 0;
};

DatasetStats dataset_stats(const std::vector<EvalSet>& sets);
std::string stats_to_json(const DatasetStats& stats);

}  // namespace phonorank

#endif  // PHONORANK_SRC_DATASET_IO_H_
