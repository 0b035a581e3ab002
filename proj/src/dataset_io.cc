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

#include "dataset_io.h"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace phonorank {

namespace {

using Json = nlohmann::ordered_json;

Json tokens_to_json(const std::vector<TaggedToken>& tokens) {
  Json arr = Json::array();
  for (const auto& t : tokens) arr.push_back(Json{{"w", t.surface}, {"lang", lang_tag(t.lang)}});
  return arr;
}

std::vector<TaggedToken> tokens_from_json(const Json& arr) {
  std::vector<TaggedToken> out;
  for (const auto& j : arr)
    out.push_back(TaggedToken{j.at("w").get<std::string>(),
                              parse_lang_tag(j.at("lang").get<std::string>())});
  return out;
}

}  // namespace

std::string eval_set_to_json_line(const EvalSet& set) {
  Json j;
  j["id"] = set.id;
  j["gold"] = Json{{"tokens", tokens_to_json(set.gold.tokens)}};
  j["gold_kind"] = sentence_kind_name(set.gold.kind());
  Json alts;
  for (AltType type : {AltType::kCs, AltType::kL1, AltType::kL2}) {
    Json arr = Json::array();
    for (const Alternative& a : set.alts_for(type)) {
      arr.push_back(Json{{"tokens", tokens_to_json(a.tokens)},
                         {"gen_cost", a.gen_cost},
                         {"heur_score", a.heur_score}});
    }
    alts[alt_type_name(type)] = std::move(arr);
  }
  j["alts"] = std::move(alts);
  return j.dump();
}

EvalSet eval_set_from_json_line(const std::string& line) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const std::exception& e) {
    throw DataError(std::string("bad dataset line: ") + e.what());
  }
  EvalSet set;
  set.id = j.at("id").get<std::string>();
  set.gold.tokens = tokens_from_json(j.at("gold").at("tokens"));
  for (AltType type : {AltType::kCs, AltType::kL1, AltType::kL2}) {
    const Json& arr = j.at("alts").at(alt_type_name(type));
    for (const auto& ja : arr) {
      Alternative a;
      a.alt_type = type;
      a.tokens = tokens_from_json(ja.at("tokens"));
      a.gen_cost = ja.at("gen_cost").get<double>();
      a.heur_score = ja.at("heur_score").get<double>();
      set.alts[static_cast<size_t>(type)].push_back(std::move(a));
    }
  }
  return set;
}

void write_dataset(const std::string& path, const std::vector<EvalSet>& sets) {
  std::ostringstream out;
  for (const EvalSet& s : sets) out << eval_set_to_json_line(s) << '\n';
  write_file(path, out.str());
}

std::vector<EvalSet> read_dataset(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<EvalSet> sets;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    sets.push_back(eval_set_from_json_line(line));
  }
  return sets;
}

DatasetStats dataset_stats(const std::vector<EvalSet>& sets) {
  DatasetStats s;
  s.sets = static_cast<int64_t>(sets.size());
  for (const EvalSet& set : sets) {
    s.alts_cs += static_cast<int64_t>(set.alts_for(AltType::kCs).size());
    s.alts_l1 += static_cast<int64_t>(set.alts_for(AltType::kL1).size());
    s.alts_l2 += static_cast<int64_t>(set.alts_for(AltType::kL2).size());
    if (set.gold.kind() == SentenceKind::kCs) ++s.cs_gold;
  }
  s.sentences = s.sets + s.alts_cs + s.alts_l1 + s.alts_l2;
  return s;
}

std::string stats_to_json(const DatasetStats& stats) {
  Json j;
  j["sets"] = stats.sets;
  j["sentences"] = stats.sentences;
  j["alts_cs"] = stats.alts_cs;
  j["alts_l1"] = stats.alts_l1;
  j["alts_l2"] = stats.alts_l2;
  j["cs_gold"] = stats.cs_gold;
  j["cs_gold_fraction"] =
      stats.sets > 0 ? static_cast<double>(stats.cs_gold) / static_cast<double>(stats.sets) : 0.0;
  return j.dump(2) + "\n";
}

}  // namespace phonorank
