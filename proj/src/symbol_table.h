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

#ifndef PHONORANK_SRC_SYMBOL_TABLE_H_
#define PHONORANK_SRC_SYMBOL_TABLE_H_

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "common.h"

namespace phonorank {

using SymbolId = int32_t;

inline constexpr SymbolId kEpsilon = 0;

// Bidirectional id <-> string map. Id 0 is always epsilon; surface strings
// are unique within a table.
class SymbolTable {
 public:
  SymbolTable() { id_of_["<eps>"] = 0; names_.push_back("<eps>"); }

  // Returns the existing id when the symbol is already present.
  SymbolId add(const std::string& name) {
    auto it = id_of_.find(name);
    if (it != id_of_.end()) return it->second;
    SymbolId id = static_cast<SymbolId>(names_.size());
    id_of_.emplace(name, id);
    names_.push_back(name);
    return id;
  }

  // -1 when absent.
  SymbolId find(const std::string& name) const {
    auto it = id_of_.find(name);
    return it == id_of_.end() ? -1 : it->second;
  }

  const std::string& name(SymbolId id) const { return names_.at(static_cast<size_t>(id)); }
  size_t size() const { return names_.size(); }

  bool operator==(const SymbolTable& other) const { return names_ == other.names_; }

 private:
  std::unordered_map<std::string, SymbolId> id_of_;
  std::vector<std::string> names_;
};

using SymbolTablePtr = std::shared_ptr<const SymbolTable>;

}  // namespace phonorank

#endif  // PHONORANK_SRC_SYMBOL_TABLE_H_
