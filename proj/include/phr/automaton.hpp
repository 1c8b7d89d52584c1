#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "phr/error.hpp"

namespace phr {

using StateId = std::uint32_t;

/// Finite automaton over an explicit alphabet. Transitions may be nondeterministic;
/// determinize_complete() produces the total deterministic form.
template <class Symbol>
class Automaton {
 public:
  Automaton() = default;
  explicit Automaton(std::set<Symbol> alphabet) : alphabet_(std::move(alphabet)) {}

  StateId add_state(std::string name, bool is_final = false) {
    if (name_index_.count(name) != 0) throw GrammarError("duplicate state '" + name + "'");
    const auto id = static_cast<StateId>(names_.size());
    name_index_.emplace(name, id);
    names_.push_back(std::move(name));
    final_.push_back(is_final);
    delta_.emplace_back();
    return id;
  }

  void set_initial(StateId q) {
    check_state(q);
    initial_ = q;
  }

  void set_final(StateId q, bool is_final = true) {
    check_state(q);
    final_[q] = is_final;
  }

  void add_symbol(const Symbol& a) { alphabet_.insert(a); }

  void add_transition(StateId from, const Symbol& a, StateId to) {
    check_state(from);
    check_state(to);
    if (alphabet_.count(a) == 0) throw GrammarError("transition on a symbol outside the alphabet");
    delta_[from][a].insert(to);
  }

  const std::set<Symbol>& alphabet() const noexcept { return alphabet_; }
  std::size_t state_count() const noexcept { return names_.size(); }
  const std::string& state_name(StateId q) const { return names_.at(q); }

  std::optional<StateId> find_state(const std::string& name) const {
    auto it = name_index_.find(name);
    if (it == name_index_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<StateId> initial() const noexcept { return initial_; }
  bool is_final(StateId q) const { return final_.at(q); }

  std::vector<StateId> finals() const {
    std::vector<StateId> out;
    for (StateId q = 0; q < final_.size(); ++q) {
      if (final_[q]) out.push_back(q);
    }
    return out;
  }

  const std::set<StateId>& successors(StateId q, const Symbol& a) const {
    static const std::set<StateId> none;
    const auto& row = delta_.at(q);
    auto it = row.find(a);
    return it == row.end() ? none : it->second;
  }

  const std::map<Symbol, std::set<StateId>>& transitions_from(StateId q) const { return delta_.at(q); }

  bool deterministic_complete() const {
    if (!initial_) return false;
    for (const auto& row : delta_) {
      for (const auto& a : alphabet_) {
        auto it = row.find(a);
        if (it == row.end() || it->second.size() != 1) return false;
      }
    }
    return true;
  }

  /// The unique successor; only meaningful on deterministic complete automata.
  StateId step(StateId q, const Symbol& a) const {
    const auto& next = successors(q, a);
    if (next.size() != 1) throw GrammarError("automaton is not deterministic and complete");
    return *next.begin();
  }

  bool accepts(std::span<const Symbol> word) const {
    if (!initial_) return false;
    std::set<StateId> current{*initial_};
    for (const auto& a : word) {
      std::set<StateId> next;
      for (StateId q : current) {
        const auto& s = successors(q, a);
        next.insert(s.begin(), s.end());
      }
      current = std::move(next);
      if (current.empty()) return false;
    }
    return std::any_of(current.begin(), current.end(), [&](StateId q) { return final_[q]; });
  }

  bool accepts(const std::vector<Symbol>& word) const { return accepts(std::span<const Symbol>(word)); }

  /// States from which some final state is reachable.
  std::vector<bool> coreachable() const {
    std::vector<bool> live = final_;
    bool changed = true;
    while (changed) {
      changed = false;
      for (StateId q = 0; q < delta_.size(); ++q) {
        if (live[q]) continue;
        for (const auto& [a, next] : delta_[q]) {
          if (std::any_of(next.begin(), next.end(), [&](StateId r) { return live[r]; })) {
            live[q] = true;
            changed = true;
            break;
          }
        }
      }
    }
    return live;
  }

  /// True when no word is accepted.
  bool empty_language() const {
    if (!initial_) return true;
    return !coreachable()[*initial_];
  }

  bool operator==(const Automaton&) const = default;

 private:
  void check_state(StateId q) const {
    if (q >= names_.size()) throw GrammarError("unknown state " + std::to_string(q));
  }

  std::set<Symbol> alphabet_;
  std::vector<std::string> names_;
  std::map<std::string, StateId> name_index_;
  std::vector<bool> final_;
  std::vector<std::map<Symbol, std::set<StateId>>> delta_;
  std::optional<StateId> initial_;
};

/// Subset construction restricted to reachable subsets, with the empty subset as the sink.
/// Subset states are named "{q0,q1}" after the member state names.
template <class Symbol>
Automaton<Symbol> determinize_complete(const Automaton<Symbol>& m) {
  Automaton<Symbol> out(m.alphabet());
  std::map<std::set<StateId>, StateId> id_of;
  std::vector<std::set<StateId>> pending;
  auto intern = [&](const std::set<StateId>& subset) {
    auto it = id_of.find(subset);
    if (it != id_of.end()) return it->second;
    std::string name = "{";
    bool first = true;
    bool accepting = false;
    for (StateId q : subset) {
      if (!first) name += ',';
      name += m.state_name(q);
      first = false;
      accepting = accepting || m.is_final(q);
    }
    name += '}';
    const StateId id = out.add_state(name, accepting);
    id_of.emplace(subset, id);
    pending.push_back(subset);
    return id;
  };
  std::set<StateId> start;
  if (m.initial()) start.insert(*m.initial());
  out.set_initial(intern(start));
  while (!pending.empty()) {
    const std::set<StateId> subset = pending.back();
    pending.pop_back();
    const StateId from = id_of.at(subset);
    for (const auto& a : m.alphabet()) {
      std::set<StateId> next;
      for (StateId q : subset) {
        const auto& s = m.successors(q, a);
        next.insert(s.begin(), s.end());
      }
      out.add_transition(from, a, intern(next));
    }
  }
  return out;
}

/// One-state automaton accepting every word over `alphabet`.
template <class Symbol>
Automaton<Symbol> universal_automaton(const std::set<Symbol>& alphabet) {
  Automaton<Symbol> m(alphabet);
  const auto q = m.add_state("q0", true);
  m.set_initial(q);
  for (const auto& a : alphabet) m.add_transition(q, a, q);
  return m;
}

/// One-state automaton accepting nothing.
template <class Symbol>
Automaton<Symbol> empty_automaton(const std::set<Symbol>& alphabet) {
  Automaton<Symbol> m(alphabet);
  m.set_initial(m.add_state("q0", false));
  return m;
}

}  // namespace phr
