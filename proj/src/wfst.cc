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

#include "wfst.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <queue>
#include <tuple>

namespace phonorank {

void Wfst::check_state(StateId s) const {
  if (s < 0 || static_cast<size_t>(s) >= arcs_.size())
    throw ConfigError("invalid state id " + std::to_string(s));
}

void Wfst::add_arc(StateId src, SymbolId in, SymbolId out, double weight, StateId dst) {
  check_state(src);
  check_state(dst);
  if (!(weight >= 0.0) || !std::isfinite(weight))
    throw ConfigError("arc weight must be finite and non-negative, got " + std::to_string(weight));
  arcs_[static_cast<size_t>(src)].push_back(Arc{in, out, weight, dst});
}

size_t Wfst::num_arcs() const {
  size_t n = 0;
  for (const auto& a : arcs_) n += a.size();
  return n;
}

namespace {

bool tables_equal(const SymbolTablePtr& a, const SymbolTablePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

}  // namespace

// Composition state = (state of a, state of b, filter state). The filter
// implements epsilon sequencing: between two symbol matches, all a-alone
// moves (output epsilon in a) must come before all b-alone moves (input
// epsilon in b). Filter 0 = just matched, 2 = consuming a-alone moves,
// 1 = consuming b-alone moves; a-alone is forbidden from 1, which makes
// the interleaving canonical so no path pair is generated twice.
Wfst compose(const Wfst& a, const Wfst& b) {
  if (!tables_equal(a.output_symbols(), b.input_symbols()))
    throw ConfigError("compose: output symbol table of the left transducer does not match the input table of the right one");

  Wfst c(a.input_symbols(), b.output_symbols());
  if (a.start() == kNoState || b.start() == kNoState) return c;

  using Triple = std::tuple<StateId, StateId, int>;
  std::map<Triple, StateId> ids;
  std::vector<Triple> pending;

  auto intern = [&](StateId sa, StateId sb, int f) {
    Triple key{sa, sb, f};
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    StateId s = c.add_state();
    ids.emplace(key, s);
    pending.push_back(key);
    return s;
  };

  StateId start = intern(a.start(), b.start(), 0);
  c.set_start(start);

  for (size_t head = 0; head < pending.size(); ++head) {
    auto [sa, sb, f] = pending[head];
    StateId self = ids.at({sa, sb, f});

    if (a.is_final(sa) && b.is_final(sb))
      c.set_final(self, tropical_times(a.final_weight(sa), b.final_weight(sb)));

    const auto& aarcs = a.arcs(sa);
    const auto& barcs = b.arcs(sb);

    for (const Arc& aa : aarcs) {
      if (aa.out == kEpsilon) {
        if (f != 1) {  // a moves alone
          StateId t = intern(aa.target, sb, 2);
          c.add_arc(self, aa.in, kEpsilon, aa.weight, t);
        }
        continue;
      }
      for (const Arc& ba : barcs) {
        if (ba.in != aa.out) continue;
        StateId t = intern(aa.target, ba.target, 0);
        c.add_arc(self, aa.in, ba.out, tropical_times(aa.weight, ba.weight), t);
      }
    }
    for (const Arc& ba : barcs) {
      if (ba.in != kEpsilon) continue;  // b moves alone, allowed from any filter state
      StateId t = intern(sa, ba.target, 1);
      c.add_arc(self, kEpsilon, ba.out, ba.weight, t);
    }
  }
  return trim(c);
}

Wfst invert(const Wfst& a) {
  Wfst r(a.output_symbols(), a.input_symbols());
  for (size_t s = 0; s < a.num_states(); ++s) r.add_state();
  if (a.start() != kNoState) r.set_start(a.start());
  for (size_t s = 0; s < a.num_states(); ++s) {
    StateId sid = static_cast<StateId>(s);
    if (a.is_final(sid)) r.set_final(sid, a.final_weight(sid));
    for (const Arc& arc : a.arcs(sid))
      r.add_arc(sid, arc.out, arc.in, arc.weight, arc.target);
  }
  return r;
}

Wfst trim(const Wfst& a) {
  size_t n = a.num_states();
  Wfst out(a.input_symbols(), a.output_symbols());
  if (a.start() == kNoState || n == 0) return out;

  std::vector<bool> fwd(n, false);
  std::vector<StateId> stack{a.start()};
  fwd[static_cast<size_t>(a.start())] = true;
  while (!stack.empty()) {
    StateId s = stack.back();
    stack.pop_back();
    for (const Arc& arc : a.arcs(s)) {
      if (!fwd[static_cast<size_t>(arc.target)]) {
        fwd[static_cast<size_t>(arc.target)] = true;
        stack.push_back(arc.target);
      }
    }
  }

  // Co-accessibility over reversed arcs.
  std::vector<std::vector<StateId>> rev(n);
  for (size_t s = 0; s < n; ++s)
    for (const Arc& arc : a.arcs(static_cast<StateId>(s)))
      rev[static_cast<size_t>(arc.target)].push_back(static_cast<StateId>(s));
  std::vector<bool> bwd(n, false);
  for (size_t s = 0; s < n; ++s) {
    if (a.is_final(static_cast<StateId>(s)) && !bwd[s]) {
      bwd[s] = true;
      stack.push_back(static_cast<StateId>(s));
    }
  }
  while (!stack.empty()) {
    StateId s = stack.back();
    stack.pop_back();
    for (StateId p : rev[static_cast<size_t>(s)]) {
      if (!bwd[static_cast<size_t>(p)]) {
        bwd[static_cast<size_t>(p)] = true;
        stack.push_back(p);
      }
    }
  }

  std::vector<StateId> remap(n, kNoState);
  for (size_t s = 0; s < n; ++s)
    if (fwd[s] && bwd[s]) remap[s] = out.add_state();
  if (remap[static_cast<size_t>(a.start())] == kNoState) return out;  // empty language

  out.set_start(remap[static_cast<size_t>(a.start())]);
  for (size_t s = 0; s < n; ++s) {
    if (remap[s] == kNoState) continue;
    StateId sid = static_cast<StateId>(s);
    if (a.is_final(sid)) out.set_final(remap[s], a.final_weight(sid));
    for (const Arc& arc : a.arcs(sid)) {
      StateId t = remap[static_cast<size_t>(arc.target)];
      if (t != kNoState) out.add_arc(remap[s], arc.in, arc.out, arc.weight, t);
    }
  }
  return out;
}

std::vector<double> distance_to_final(const Wfst& a) {
  size_t n = a.num_states();
  std::vector<double> dist(n, kInfiniteWeight);
  std::vector<std::vector<std::pair<StateId, double>>> rev(n);
  for (size_t s = 0; s < n; ++s)
    for (const Arc& arc : a.arcs(static_cast<StateId>(s)))
      rev[static_cast<size_t>(arc.target)].emplace_back(static_cast<StateId>(s), arc.weight);

  using QE = std::pair<double, StateId>;
  std::priority_queue<QE, std::vector<QE>, std::greater<QE>> queue;
  for (size_t s = 0; s < n; ++s) {
    StateId sid = static_cast<StateId>(s);
    if (a.is_final(sid)) {
      dist[s] = a.final_weight(sid);
      queue.emplace(dist[s], sid);
    }
  }
  while (!queue.empty()) {
    auto [d, s] = queue.top();
    queue.pop();
    if (d > dist[static_cast<size_t>(s)]) continue;
    for (auto [p, w] : rev[static_cast<size_t>(s)]) {
      double nd = d + w;
      if (nd < dist[static_cast<size_t>(p)]) {
        dist[static_cast<size_t>(p)] = nd;
        queue.emplace(nd, p);
      }
    }
  }
  return dist;
}

namespace {

struct SearchNode {
  double f = 0.0;        // g + exact cost-to-final (g + final weight once complete)
  double g = 0.0;
  StateId state = kNoState;
  bool complete = false;
  std::vector<SymbolId> output;
  uint64_t order = 0;    // FIFO tie-break inside the queue
};

struct NodeCompare {
  // std::priority_queue is a max-heap; invert for cheapest-first.
  bool operator()(const SearchNode& x, const SearchNode& y) const {
    if (x.f != y.f) return x.f > y.f;
    return x.order > y.order;
  }
};

}  // namespace

std::vector<Path> nbest(const Wfst& a, int n, const NBestOptions& opts) {
  std::vector<Path> result;
  if (n < 1) throw ConfigError("nbest: n must be >= 1");
  if (a.start() == kNoState) return result;

  std::vector<double> h = distance_to_final(a);
  if (h[static_cast<size_t>(a.start())] == kInfiniteWeight) return result;

  std::priority_queue<SearchNode, std::vector<SearchNode>, NodeCompare> queue;
  uint64_t order = 0;
  queue.push(SearchNode{h[static_cast<size_t>(a.start())], 0.0, a.start(), false, {}, order++});

  // Since the heuristic is the exact completion cost, nodes pop in
  // non-decreasing order of finished path cost. Collect distinct outputs
  // until the n-th distinct cost boundary is passed, then order the
  // survivors canonically.
  std::map<std::vector<SymbolId>, double> found;
  double boundary = kInfiniteWeight;
  uint64_t expansions = 0;

  while (!queue.empty()) {
    SearchNode node = queue.top();
    queue.pop();
    if (node.f > boundary) break;
    if (++expansions > opts.max_expansions) {
      log_verbose("nbest: expansion cap %llu reached, returning partial result",
                  static_cast<unsigned long long>(opts.max_expansions));
      break;
    }

    if (node.complete) {
      auto it = found.find(node.output);
      if (it == found.end()) {
        found.emplace(node.output, node.g);
        if (found.size() == static_cast<size_t>(n)) boundary = node.f;
      }
      continue;
    }

    if (a.is_final(node.state)) {
      double total = tropical_times(node.g, a.final_weight(node.state));
      queue.push(SearchNode{total, total, node.state, true, node.output, order++});
    }
    for (const Arc& arc : a.arcs(node.state)) {
      double g = tropical_times(node.g, arc.weight);
      double rest = h[static_cast<size_t>(arc.target)];
      if (rest == kInfiniteWeight) continue;
      SearchNode next{g + rest, g, arc.target, false, node.output, order++};
      if (arc.out != kEpsilon) next.output.push_back(arc.out);
      queue.push(std::move(next));
    }
  }

  result.reserve(found.size());
  for (auto& [output, weight] : found) result.push_back(Path{output, weight});
  std::sort(result.begin(), result.end(), [](const Path& x, const Path& y) {
    if (x.weight != y.weight) return x.weight < y.weight;
    return x.output < y.output;
  });
  if (result.size() > static_cast<size_t>(n)) result.resize(static_cast<size_t>(n));
  return result;
}

Wfst linear_acceptor(const std::vector<SymbolId>& symbols, SymbolTablePtr symbols_table) {
  Wfst m(symbols_table, symbols_table);
  StateId s = m.add_state();
  m.set_start(s);
  for (SymbolId sym : symbols) {
    StateId t = m.add_state();
    m.add_arc(s, sym, sym, 0.0, t);
    s = t;
  }
  m.set_final(s, 0.0);
  return m;
}

void write_att_text(const Wfst& a, std::ostream& os) {
  auto sym = [](const SymbolTablePtr& t, SymbolId id) {
    return t ? t->name(id) : std::to_string(id);
  };
  for (size_t s = 0; s < a.num_states(); ++s) {
    for (const Arc& arc : a.arcs(static_cast<StateId>(s))) {
      os << s << ' ' << arc.target << ' ' << sym(a.input_symbols(), arc.in) << ' '
         << sym(a.output_symbols(), arc.out) << ' ' << arc.weight << '\n';
    }
  }
  for (size_t s = 0; s < a.num_states(); ++s) {
    StateId sid = static_cast<StateId>(s);
    if (a.is_final(sid)) os << s << ' ' << a.final_weight(sid) << '\n';
  }
}

}  // namespace phonorank
