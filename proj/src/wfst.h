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

#ifndef PHONORANK_SRC_WFST_H_
#define PHONORANK_SRC_WFST_H_

#include <iosfwd>
#include <limits>
#include <vector>

#include "symbol_table.h"

namespace phonorank {

using StateId = int32_t;

inline constexpr StateId kNoState = -1;
inline constexpr double kInfiniteWeight = std::numeric_limits<double>::infinity();

// Tropical semiring: costs combine along a path by addition, alternatives
// by minimum. Identity of min is +inf, identity of + is 0.
inline double tropical_plus(double a, double b) { return a < b ? a : b; }
inline double tropical_times(double a, double b) { return a + b; }

struct Arc {
  SymbolId in = kEpsilon;
  SymbolId out = kEpsilon;
  double weight = 0.0;
  StateId target = kNoState;
};

// An accepting path projected to its output side: output symbols with
// epsilons removed, and the total cost (sum of arc weights plus the final
// weight of the last state).
struct Path {
  std::vector<SymbolId> output;
  double weight = 0.0;
};

// Weighted finite-state transducer over the tropical semiring. Built
// imperatively (add_state / add_arc), then treated as immutable: all
// algorithms below are pure functions, so sharing across threads is safe.
class Wfst {
 public:
  Wfst() = default;
  Wfst(SymbolTablePtr input_symbols, SymbolTablePtr output_symbols)
      : isyms_(std::move(input_symbols)), osyms_(std::move(output_symbols)) {}

  StateId add_state() {
    arcs_.emplace_back();
    finals_.push_back(kInfiniteWeight);
    return static_cast<StateId>(arcs_.size() - 1);
  }

  void set_start(StateId s) { check_state(s); start_ = s; }

  // A state is final iff its final weight is finite.
  void set_final(StateId s, double weight) { check_state(s); finals_[static_cast<size_t>(s)] = weight; }

  void add_arc(StateId src, SymbolId in, SymbolId out, double weight, StateId dst);

  StateId start() const { return start_; }
  size_t num_states() const { return arcs_.size(); }
  size_t num_arcs() const;
  bool is_final(StateId s) const { return final_weight(s) < kInfiniteWeight; }
  double final_weight(StateId s) const { return finals_.at(static_cast<size_t>(s)); }
  const std::vector<Arc>& arcs(StateId s) const { return arcs_.at(static_cast<size_t>(s)); }

  const SymbolTablePtr& input_symbols() const { return isyms_; }
  const SymbolTablePtr& output_symbols() const { return osyms_; }

 private:
  void check_state(StateId s) const;

  SymbolTablePtr isyms_;
  SymbolTablePtr osyms_;
  std::vector<std::vector<Arc>> arcs_;
  std::vector<double> finals_;
  StateId start_ = kNoState;
};

// Relational composition with the standard epsilon-sequencing filter, so
// every compatible path pair of (a, b) yields exactly one composed path.
// Requires a's output symbol table to equal b's input table (ConfigError
// otherwise).
Wfst compose(const Wfst& a, const Wfst& b);

// Swaps input/output labels and symbol tables; weights unchanged.
Wfst invert(const Wfst& a);

// Removes states that are not on any start->final path. Kept states retain
// their relative order, so an already-trim machine comes back identical.
Wfst trim(const Wfst& a);

struct NBestOptions {
  // Safety valve for machines with epsilon cycles: total queue pops before
  // the search gives up and returns what it has.
  uint64_t max_expansions = 1000000;
};

// Up to n accepting paths with the lowest total costs, ascending. Paths with
// identical output symbol sequences are deduplicated keeping the cheapest.
// Ties in cost are broken lexicographically on output symbol ids, so results
// are deterministic. Returns an empty list when no accepting path exists.
std::vector<Path> nbest(const Wfst& a, int n, const NBestOptions& opts = {});

// Cheapest cost from every state to an accepting end (including final
// weight); +inf for states with no accepting continuation. Exposed for the
// n-best heuristic and for trim-style analyses.
std::vector<double> distance_to_final(const Wfst& a);

// Single straight-line acceptor for a symbol sequence (identity transducer,
// all costs 0).
Wfst linear_acceptor(const std::vector<SymbolId>& symbols, SymbolTablePtr symbols_table);

// Debug dump in the AT&T text format: `src dst in out weight` per arc and
// `state weight` per final state, with symbol surface forms.
void write_att_text(const Wfst& a, std::ostream& os);

}  // namespace phonorank

#endif  // PHONORANK_SRC_WFST_H_
