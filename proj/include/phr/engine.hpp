#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "phr/automaton.hpp"
#include "phr/canonical.hpp"
#include "phr/grammar.hpp"
#include "phr/hypergraph.hpp"

namespace phr {

/// Search bounds. max_states caps the number of distinct (graph, control state) pairs kept.
struct Limits {
  std::size_t max_steps = 8;
  std::size_t max_nodes = 64;
  std::size_t max_edges = 64;
  std::size_t max_results = 100000;
  std::size_t max_states = 500000;
};

struct LanguageResult {
  GraphSet graphs;                                     // terminal graphs, canonical
  std::map<std::string, std::vector<TableIndex>> traces;  // shortest trace per graph key
  bool exhaustive = true;  // every terminal graph within the bounds was found
  bool saturated = false;  // in addition, no new state appears after max_steps
  std::size_t states = 0;
};

struct StringResult {
  std::set<Word> words;
  std::map<Word, std::vector<TableIndex>> traces;
  bool exhaustive = true;
  bool saturated = false;
  std::size_t states = 0;
};

enum class Verdict { yes, no_within_limits, unknown };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::yes: return "yes";
    case Verdict::no_within_limits: return "no-within-limits";
    case Verdict::unknown: return "unknown";
  }
  return "unknown";
}

struct MemberResult {
  Verdict verdict = Verdict::unknown;
  std::vector<TableIndex> trace;
  std::size_t states = 0;
};

namespace detail {

/// Labels from which a terminally labelled hypergraph is derivable, ignoring which table
/// each edge uses.
inline std::vector<bool> productive_labels(const PHRGrammar& g) {
  const auto& sig = g.signature();
  std::vector<bool> prod(sig.size(), false);
  for (LabelId a : g.terminals()) prod[a] = true;
  bool changed = true;
  while (changed) {
    changed = false;
    for (LabelId x = 0; x < sig.size(); ++x) {
      if (prod[x]) continue;
      for (const auto& [i, t] : g.tables()) {
        for (const auto& r : t.rules_for(x)) {
          if (std::all_of(r.edges().begin(), r.edges().end(), [&](const Edge& e) { return prod[e.label]; })) {
            prod[x] = true;
            break;
          }
        }
        if (prod[x]) break;
      }
      changed = changed || prod[x];
    }
  }
  return prod;
}

inline constexpr std::size_t unbounded = static_cast<std::size_t>(-1) / 4;

/// Least numbers of edges and of internal nodes among the terminally labelled hypergraphs
/// derivable from X•; `unbounded` for unproductive labels. Node counts are lower bounds
/// only for repetition-free rules.
struct TerminalYield {
  std::vector<std::size_t> edges;
  std::vector<std::size_t> nodes;
};

inline TerminalYield min_terminal_yield(const PHRGrammar& g) {
  const auto& sig = g.signature();
  TerminalYield y{std::vector<std::size_t>(sig.size(), unbounded), std::vector<std::size_t>(sig.size(), unbounded)};
  for (LabelId a : g.terminals()) {
    y.edges[a] = 1;
    y.nodes[a] = 0;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (LabelId x = 0; x < sig.size(); ++x) {
      for (const auto& [i, t] : g.tables()) {
        for (const auto& r : t.rules_for(x)) {
          std::size_t edges = 0;
          std::size_t nodes = r.repetition_free() ? r.node_count() - r.type() : 0;
          for (const Edge& e : r.edges()) {
            edges = std::min(unbounded, edges + y.edges[e.label]);
            nodes = std::min(unbounded, nodes + y.nodes[e.label]);
          }
          if (edges < y.edges[x]) {
            y.edges[x] = edges;
            changed = true;
          }
          if (edges < unbounded && nodes < y.nodes[x]) {
            y.nodes[x] = nodes;
            changed = true;
          }
        }
      }
    }
  }
  return y;
}

/// Set of byte strings packed into one arena, indexed by open addressing.
class KeyArena {
 public:
  bool contains(std::string_view k) const { return find(k, std::hash<std::string_view>{}(k)).second; }

  /// Inserts k; false if it was present.
  bool insert(std::string_view k) {
    if ((count_ + 1) * 2 > slots_.size()) grow();
    const std::size_t h = std::hash<std::string_view>{}(k);
    auto [slot, found] = find(k, h);
    if (found) return false;
    slots_[slot] = pack(bytes_.size(), h);
    put_varint(bytes_, k.size());
    bytes_.append(k);
    ++count_;
    return true;
  }

  std::size_t size() const { return count_; }

 private:
  static constexpr std::uint64_t offset_mask = (std::uint64_t{1} << 48) - 1;

  static std::uint64_t pack(std::size_t offset, std::size_t h) {
    return (static_cast<std::uint64_t>(offset) + 1) | (static_cast<std::uint64_t>(h >> 48) << 48);
  }

  std::string_view at(std::uint64_t slot) const {
    std::size_t pos = static_cast<std::size_t>(slot & offset_mask) - 1;
    std::size_t len = 0;
    for (unsigned shift = 0;; shift += 7) {
      const auto byte = static_cast<unsigned char>(bytes_[pos++]);
      len |= static_cast<std::size_t>(byte & 0x7f) << shift;
      if (byte < 0x80) break;
    }
    return std::string_view(bytes_).substr(pos, len);
  }

  std::pair<std::size_t, bool> find(std::string_view k, std::size_t h) const {
    if (slots_.empty()) return {0, false};
    const std::size_t mask = slots_.size() - 1;
    const std::uint64_t tag = static_cast<std::uint64_t>(h >> 48) << 48;
    for (std::size_t i = h & mask;; i = (i + 1) & mask) {
      const std::uint64_t slot = slots_[i];
      if (slot == 0) return {i, false};
      if ((slot & ~offset_mask) == tag && at(slot) == k) return {i, true};
    }
  }

  void grow() {
    std::vector<std::uint64_t> old = std::move(slots_);
    slots_.assign(old.empty() ? 1024 : old.size() * 2, 0);
    const std::size_t mask = slots_.size() - 1;
    for (std::uint64_t slot : old) {
      if (slot == 0) continue;
      std::size_t i = std::hash<std::string_view>{}(at(slot)) & mask;
      while (slots_[i] != 0) i = (i + 1) & mask;
      slots_[i] = slot;
    }
  }

  std::string bytes_;
  std::vector<std::uint64_t> slots_;
  std::size_t count_ = 0;
};

struct Candidate {
  const Hypergraph* rhs;
  std::size_t edge_lb;     // least edge count of a terminal graph derived from rhs
  std::size_t node_delta;  // |V_R| - type(R), only meaningful for repetition-free rhs
  std::size_t node_lb;     // node_delta plus the least internal nodes added below rhs
  bool identity;
};

class Search {
 public:
  Search(const PHRGrammar& g, const Automaton<TableIndex>& control, const Limits& limits)
      : g_(g), dfa_(determinize_complete(control)), limits_(limits) {
    prod_ = productive_labels(g_);
    yield_ = min_terminal_yield(g_);
    live_ = dfa_.coreachable();
    const auto& sig = g_.signature();
    rf_ = true;
    for (const auto& [i, t] : g_.tables()) {
      auto& per_label = candidates_[i];
      per_label.resize(sig.size());
      for (LabelId x = 0; x < sig.size(); ++x) {
        for (const auto& r : t.rules_for(x)) {
          bool ok = std::all_of(r.edges().begin(), r.edges().end(), [&](const Edge& e) { return prod_[e.label]; });
          if (!ok) continue;
          Candidate c{&r, 0, 0, 0, is_handle_layout(r, x)};
          if (r.repetition_free()) {
            c.node_delta = r.node_count() - r.type();
          } else {
            rf_ = false;
          }
          c.node_lb = c.node_delta;
          for (const Edge& e : r.edges()) {
            c.edge_lb += yield_.edges[e.label];
            c.node_lb += yield_.nodes[e.label];
          }
          per_label[x].push_back(c);
        }
      }
    }
  }

  bool repetition_free() const { return rf_; }

  /// Breadth-first search. `stop` is consulted on every new terminal graph in an accepting
  /// control state and ends the search when it returns true.
  template <class OnResult>
  void run(std::size_t max_nodes, std::size_t max_edges, OnResult&& on_result) {
    max_nodes_ = max_nodes;
    max_edges_ = max_edges;
    const Hypergraph start = g_.start_graph();
    std::vector<Frontier> level;
    if (!dfa_.initial() || !live_[*dfa_.initial()]) {
      saturated_ = true;
      return;
    }
    if (!admissible(start)) {
      unsound_ = !prune_sound(start);
      saturated_ = true;
      return;
    }
    auto cf = canonical_form(start);
    if (add_state(std::move(cf), *dfa_.initial(), none, 0, level, on_result)) return;
    for (std::size_t depth = 0; depth <= limits_.max_steps; ++depth) {
      std::sort(level.begin(), level.end(),
                [](const Frontier& a, const Frontier& b) { return std::tie(a.key, a.q) < std::tie(b.key, b.q); });
      const bool probe = depth == limits_.max_steps;
      std::vector<Frontier> next;
      bool grew = false;
      for (Frontier& s : level) {
        if (detail::is_string_key(s.key)) s.graph = detail::string_key_graph(s.key);
        for (const auto& [i, t] : g_.tables()) {
          const StateId q2 = dfa_.step(s.q, i);
          if (!live_[q2]) continue;
          if (probe) {
            if (expand_probe(s, i, q2)) {
              grew = true;
              break;
            }
            continue;
          }
          if (expand(s, i, q2, next, on_result)) return;
          if (capped_) return;
        }
        if (probe && grew) break;
        s.graph = Hypergraph();
      }
      if (probe) {
        saturated_ = !grew;
        return;
      }
      level = std::move(next);
      if (level.empty()) {
        saturated_ = true;
        return;
      }
    }
  }

  bool exhaustive() const { return !unsound_ && !capped_; }
  bool capped() const { return capped_; }
  bool saturated() const { return saturated_ && exhaustive(); }
  std::size_t state_count() const { return states_.size(); }

  std::vector<TableIndex> trace_of(std::uint32_t s) const {
    std::vector<TableIndex> out;
    while (states_[s].parent != none) {
      out.push_back(states_[s].via);
      s = states_[s].parent;
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

  bool accepting(StateId q) const { return dfa_.is_final(q); }
  const PHRGrammar& grammar() const { return g_; }

 private:
  static constexpr std::uint32_t none = static_cast<std::uint32_t>(-1);

  struct State {
    std::uint32_t parent;
    TableIndex via;
  };

 public:
  /// A state of the current or next breadth-first level.
  struct Frontier {
    std::uint32_t id;
    StateId q;
    std::string key;
    Hypergraph graph;
  };

 private:

  // Lower bounds on the edges and nodes of any terminal graph derivable from h.
  std::pair<std::size_t, std::size_t> final_size_lb(const Hypergraph& h) const {
    std::size_t edges = 0;
    std::size_t nodes = h.node_count();
    for (const Edge& e : h.edges()) {
      edges = std::min(unbounded, edges + yield_.edges[e.label]);
      nodes = std::min(unbounded, nodes + yield_.nodes[e.label]);
    }
    return {edges, rf_ ? nodes : h.node_count()};
  }

  bool admissible(const Hypergraph& h) const {
    const auto [edges, nodes] = final_size_lb(h);
    return edges <= max_edges_ && nodes <= max_nodes_;
  }

  // Whether excluding h from the search can lose results inside the bounds.
  bool prune_sound(const Hypergraph& h) const { return final_size_lb(h).first > max_edges_ || rf_; }

  static std::string visit_key(const std::string& key, StateId q) {
    std::string k = key;
    put_varint(k, q);
    return k;
  }

  template <class OnResult>
  bool add_state(CanonicalForm cf, StateId q, std::uint32_t parent, TableIndex via, std::vector<Frontier>& level,
                 OnResult& on_result) {
    const auto vk = visit_key(cf.key, q);
    if (visited_.contains(vk)) return false;
    if (states_.size() >= std::min<std::size_t>(limits_.max_states, none)) {
      capped_ = true;
      return true;
    }
    visited_.insert(vk);
    const auto s = static_cast<std::uint32_t>(states_.size());
    states_.push_back({parent, via});
    level.push_back({s, q, std::move(cf.key), std::move(cf.graph)});
    Frontier& f = level.back();
    if (dfa_.is_final(q) && g_.terminally_labelled(f.graph)) {
      if (on_result(s, f)) return true;
    }
    if (detail::is_string_key(f.key)) f.graph = Hypergraph();  // rebuilt from the key when expanded
    return capped_;
  }

public:
  void cap() { capped_ = true; }

private:
  // Enumerates choice functions for state s under table i with bound pruning.
  template <class F>
  void choices(const Frontier& s, TableIndex i, F&& f) {
    const Hypergraph& h = s.graph;
    const auto& per_label = candidates_.at(i);
    const std::size_t m = h.edge_count();
    std::vector<const std::vector<Candidate>*> opts(m);
    bool all_identity = true;
    for (std::size_t e = 0; e < m; ++e) {
      opts[e] = &per_label[h.edge(e).label];
      if (opts[e]->empty()) return;
      if (opts[e]->size() != 1 || !(*opts[e])[0].identity) all_identity = false;
    }
    if (all_identity) {
      f(nullptr);
      return;
    }
    std::vector<const Hypergraph*> slots(m, nullptr);
    std::vector<std::size_t> rest_edges(m + 1, 0);
    std::vector<std::size_t> rest_nodes(m + 1, 0);
    for (std::size_t e = m; e-- > 0;) {
      std::size_t edges = unbounded;
      std::size_t nodes = unbounded;
      for (const auto& c : *opts[e]) {
        edges = std::min(edges, c.edge_lb);
        nodes = std::min(nodes, c.node_lb);
      }
      rest_edges[e] = std::min(unbounded, rest_edges[e + 1] + edges);
      rest_nodes[e] = std::min(unbounded, rest_nodes[e + 1] + nodes);
    }
    const std::size_t base_nodes = h.node_count();
    auto rec = [&](auto&& self, std::size_t e, std::size_t edges_lb, std::size_t nodes_lb) -> void {
      if (e == m) {
        f(&slots);
        return;
      }
      for (const auto& c : *opts[e]) {
        const std::size_t el = edges_lb + c.edge_lb;
        if (el + rest_edges[e + 1] > max_edges_) continue;  // always sound
        const std::size_t nl = nodes_lb + c.node_lb;
        if (rf_ && nl + rest_nodes[e + 1] > max_nodes_) continue;  // sound: nodes never disappear
        slots[e] = c.rhs;
        self(self, e + 1, el, nl);
      }
    };
    rec(rec, 0, 0, base_nodes);
  }

  template <class OnResult>
  bool expand(const Frontier& s, TableIndex i, StateId q2, std::vector<Frontier>& next, OnResult& on_result) {
    bool stop = false;
    choices(s, i, [&](const std::vector<const Hypergraph*>* slots) {
      if (stop) return;
      if (slots == nullptr) {
        if (q2 == s.q) return;
        stop = add_state(CanonicalForm{s.key, s.graph}, q2, s.id, i, next, on_result);
        return;
      }
      Hypergraph succ = replace_edges(s.graph, *slots);
      if (!admissible(succ)) {
        unsound_ = unsound_ || !prune_sound(succ);
        return;
      }
      stop = add_state(canonical_form(succ), q2, s.id, i, next, on_result);
    });
    return stop;
  }

  bool expand_probe(const Frontier& s, TableIndex i, StateId q2) {
    bool grew = false;
    choices(s, i, [&](const std::vector<const Hypergraph*>* slots) {
      if (grew) return;
      if (slots == nullptr) {
        grew = !visited_.contains(visit_key(s.key, q2));
        return;
      }
      Hypergraph succ = replace_edges(s.graph, *slots);
      if (!admissible(succ)) {
        if (!prune_sound(succ)) grew = true;
        return;
      }
      grew = !visited_.contains(visit_key(canonical_key(succ), q2));
    });
    return grew;
  }

  const PHRGrammar& g_;
  Automaton<TableIndex> dfa_;
  Limits limits_;
  std::vector<bool> prod_;
  TerminalYield yield_;
  std::vector<bool> live_;
  std::map<TableIndex, std::vector<std::vector<Candidate>>> candidates_;
  bool rf_ = true;
  std::size_t max_nodes_ = 0;
  std::size_t max_edges_ = 0;
  std::vector<State> states_;
  KeyArena visited_;
  bool unsound_ = false;
  bool capped_ = false;
  bool saturated_ = false;
};

inline LanguageResult enumerate_with(const PHRGrammar& g, const Automaton<TableIndex>& control, const Limits& limits) {
  Search search(g, control, limits);
  LanguageResult out;
  search.run(limits.max_nodes, limits.max_edges, [&](std::size_t s, const auto& st) {
    if (out.graphs.count(st.key) != 0) return false;
    if (out.graphs.size() >= limits.max_results) {
      search.cap();
      return true;
    }
    out.graphs.emplace(st.key, st.graph);
    out.traces.emplace(st.key, search.trace_of(s));
    return false;
  });
  out.exhaustive = search.exhaustive();
  out.saturated = search.saturated();
  out.states = search.state_count();
  return out;
}

inline StringResult strings_of(const LanguageResult& lang, const std::set<LabelId>& empty_labels) {
  StringResult out;
  out.exhaustive = lang.exhaustive;
  out.saturated = lang.saturated;
  out.states = lang.states;
  for (const auto& [key, h] : lang.graphs) {
    auto w = str_extract(h, empty_labels);
    if (!w || w->empty()) continue;
    auto [it, fresh] = out.words.insert(*w);
    if (fresh) {
      out.traces.emplace(*w, lang.traces.at(key));
    } else {
      auto& best = out.traces[*w];
      const auto& t = lang.traces.at(key);
      if (t.size() < best.size()) best = t;
    }
  }
  return out;
}

inline MemberResult member_with(const PHRGrammar& g, const Automaton<TableIndex>& control, const Word& w,
                                const Limits& limits) {
  MemberResult out;
  if (w.empty()) {
    out.verdict = Verdict::no_within_limits;
    return out;
  }
  for (LabelId x : w) {
    if (!g.signature().valid(x) || g.signature().arity(x) != 2) {
      out.verdict = Verdict::no_within_limits;
      return out;
    }
  }
  const std::string target = canonical_key(string_graph(w, g.signature()));
  Search search(g, control, limits);
  std::size_t max_nodes = limits.max_nodes;
  std::size_t max_edges = limits.max_edges;
  if (search.repetition_free()) max_nodes = std::min(max_nodes, w.size() + 1);
  max_edges = std::min(max_edges, w.size());
  bool found = false;
  search.run(max_nodes, max_edges, [&](std::size_t s, const auto& st) {
    if (st.key != target) return false;
    found = true;
    out.trace = search.trace_of(s);
    return true;
  });
  out.states = search.state_count();
  if (found) {
    out.verdict = Verdict::yes;
  } else if (search.capped()) {
    out.verdict = Verdict::unknown;
  } else {
    out.verdict = Verdict::no_within_limits;
  }
  return out;
}

}  // namespace detail

inline LanguageResult enumerate_language(const PHRGrammar& g, const Limits& limits = {}) {
  return detail::enumerate_with(g, universal_automaton(g.indices()), limits);
}

inline LanguageResult enumerate_language(const ControlledPHRGrammar& g, const Limits& limits = {}) {
  return detail::enumerate_with(g.underlying, g.control, limits);
}

/// STR of the enumerated language, modulo ε. Edges whose label is in `empty_labels` spell ε.
inline StringResult enumerate_strings(const PHRGrammar& g, const Limits& limits = {},
                                      const std::set<LabelId>& empty_labels = {}) {
  return detail::strings_of(enumerate_language(g, limits), empty_labels);
}

inline StringResult enumerate_strings(const ControlledPHRGrammar& g, const Limits& limits = {},
                                      const std::set<LabelId>& empty_labels = {}) {
  return detail::strings_of(enumerate_language(g, limits), empty_labels);
}

inline MemberResult member_string(const PHRGrammar& g, const Word& w, const Limits& limits = {}) {
  return detail::member_with(g, universal_automaton(g.indices()), w, limits);
}

inline MemberResult member_string(const ControlledPHRGrammar& g, const Word& w, const Limits& limits = {}) {
  return detail::member_with(g.underlying, g.control, w, limits);
}

/// Labels reachable from the start label through rule right-hand sides of any table.
inline std::vector<bool> reachable_labels(const PHRGrammar& g) {
  const auto& sig = g.signature();
  std::vector<bool> reach(sig.size(), false);
  std::vector<LabelId> work{g.start()};
  reach[g.start()] = true;
  while (!work.empty()) {
    const LabelId x = work.back();
    work.pop_back();
    for (const auto& [i, t] : g.tables()) {
      for (const auto& r : t.rules_for(x)) {
        for (const Edge& e : r.edges()) {
          if (!reach[e.label]) {
            reach[e.label] = true;
            work.push_back(e.label);
          }
        }
      }
    }
  }
  return reach;
}

/// Restricts the grammar to labels reachable from its start label. Label ids are renumbered
/// densely in their original order.
inline PHRGrammar remove_unreachable(const PHRGrammar& g) {
  const auto reach = reachable_labels(g);
  if (std::all_of(reach.begin(), reach.end(), [](bool b) { return b; })) return g;
  const auto& sig = g.signature();
  Signature out_sig;
  std::vector<LabelId> map(sig.size(), 0);
  for (LabelId x = 0; x < sig.size(); ++x) {
    if (reach[x]) map[x] = out_sig.add(sig.name(x), sig.arity(x));
  }
  auto rename = [&](LabelId x) { return map[x]; };
  std::map<TableIndex, Table> tables;
  for (const auto& [i, t] : g.tables()) {
    RuleMap rules;
    for (LabelId x = 0; x < sig.size(); ++x) {
      if (!reach[x]) continue;
      for (const auto& r : t.rules_for(x)) rules[map[x]].push_back(relabel(r, rename));
    }
    tables.emplace(i, Table(out_sig, rules));
  }
  std::set<LabelId> terminals;
  for (LabelId a : g.terminals()) {
    if (reach[a]) terminals.insert(map[a]);
  }
  return PHRGrammar(std::move(out_sig), std::move(terminals), map[g.start()], std::move(tables), g.order());
}

}  // namespace phr
