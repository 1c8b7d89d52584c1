#pragma once

#include <map>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "phr/engine.hpp"
#include "phr/transforms.hpp"

namespace support {

/// Bounds for strings of length at most n in a repetition-free grammar: the step bound is
/// generous and the search ends by saturation.
inline phr::Limits up_to_length(std::size_t n, std::size_t steps = 64, std::size_t states = 2'000'000) {
  phr::Limits l;
  l.max_steps = steps;
  l.max_nodes = n + 1;
  l.max_edges = n;
  l.max_states = states;
  return l;
}

/// Same edge bound with room for letters that a later step erases.
inline phr::Limits erasing_room(std::size_t n, std::size_t steps = 64) {
  auto l = up_to_length(n, steps);
  l.max_nodes = 4 * n + 1;
  return l;
}

template <class G>
oracle::Strings strings(const G& g, const phr::Limits& l, const std::set<phr::LabelId>& empty = {}) {
  const auto r = phr::enumerate_strings(g, l, empty);
  const auto& sig = [&]() -> const phr::Signature& {
    if constexpr (std::is_same_v<G, phr::ControlledPHRGrammar>) {
      return g.underlying.signature();
    } else {
      return g.signature();
    }
  }();
  return phr::spell_all(sig, r.words);
}

inline std::vector<std::string> letters(const std::string& w) {
  std::vector<std::string> out;
  for (char c : w) out.emplace_back(1, c);
  return out;
}

/// Trie automaton accepting exactly `words` (ε is ignored).
inline phr::WordAutomaton finite_automaton(const oracle::Strings& words, std::set<std::string> alphabet = {}) {
  for (const auto& w : words) {
    for (char c : w) alphabet.emplace(1, c);
  }
  phr::WordAutomaton m(alphabet);
  m.set_initial(m.add_state("t"));
  for (const auto& w : words) {
    phr::StateId at = *m.initial();
    std::string prefix = "t";
    for (char c : w) {
      prefix += c;
      auto next = m.find_state(prefix);
      if (!next) {
        next = m.add_state(prefix);
        m.add_transition(at, std::string(1, c), *next);
      }
      at = *next;
    }
    m.set_final(at);
  }
  return m;
}

inline phr::PHRGrammar finite(const oracle::Strings& words) { return phr::regular_to_phr(finite_automaton(words)); }

/// a* style automaton over one letter: a⁺ once ε is excluded.
inline phr::WordAutomaton star(const std::string& a) {
  phr::WordAutomaton m({a});
  const auto q = m.add_state("q", true);
  m.set_initial(q);
  m.add_transition(q, a, q);
  return m;
}

/// Graphs derivable from `start` in exactly n sequential steps, for n = 0..steps.
inline std::vector<phr::GraphSet> sequential_levels(const phr::Hypergraph& start, const std::vector<phr::Rule>& rules,
                                                    std::size_t steps) {
  std::vector<phr::GraphSet> levels(1);
  phr::insert_canonical(levels[0], start);
  for (std::size_t n = 0; n < steps; ++n) {
    phr::GraphSet next;
    for (const auto& [k, h] : levels[n]) {
      for (const auto& d : phr::direct_derive(h, rules)) next.emplace(phr::canonical_key(d.result), d.result);
    }
    levels.push_back(std::move(next));
  }
  return levels;
}

struct Decomposition {
  std::size_t graphs = 0;      // derived graphs compared, over all labels and lengths
  std::size_t mismatches = 0;  // size of the symmetric differences
};

/// For every nonterminal X and 1 ≤ n ≤ steps: the graphs X• derives in n steps are exactly
/// R[e₁/H₁, ..., e_m/H_m] for a rule (X, R) and Hᵢ derived from lab(eᵢ)• in kᵢ steps with
/// k₁ + ... + k_m = n - 1, eᵢ ranging over the nonterminal edges of R.
inline Decomposition check_context_freeness(const phr::HRGrammar& g, std::size_t steps) {
  const auto& sig = g.signature();
  std::map<phr::LabelId, std::vector<phr::GraphSet>> derived;
  for (phr::LabelId x : g.nonterminals()) derived[x] = sequential_levels(phr::handle(x, sig), g.rules(), steps);
  Decomposition out;
  for (phr::LabelId x : g.nonterminals()) {
    for (std::size_t n = 1; n <= steps; ++n) {
      std::set<std::string> composed;
      for (const auto& r : g.rules()) {
        if (r.lhs != x) continue;
        std::vector<std::size_t> slots;
        for (std::size_t e = 0; e < r.rhs.edge_count(); ++e) {
          if (g.nonterminals().count(r.rhs.edge(e).label) != 0) slots.push_back(e);
        }
        std::map<std::size_t, phr::Hypergraph> sigma;
        auto rec = [&](auto& self, std::size_t i, std::size_t left) -> void {
          if (i == slots.size()) {
            if (left == 0) composed.insert(phr::canonical_key(phr::replace(r.rhs, sigma)));
            return;
          }
          const auto label = r.rhs.edge(slots[i]).label;
          for (std::size_t k = 0; k <= left; ++k) {
            for (const auto& [key, h] : derived[label][k]) {
              sigma[slots[i]] = h;
              self(self, i + 1, left - k);
            }
          }
          sigma.erase(slots[i]);
        };
        rec(rec, 0, n - 1);
      }
      std::set<std::string> direct;
      for (const auto& [key, h] : derived[x][n]) direct.insert(key);
      out.graphs += direct.size();
      std::vector<std::string> diff;
      std::set_symmetric_difference(direct.begin(), direct.end(), composed.begin(), composed.end(),
                                    std::back_inserter(diff));
      out.mismatches += diff.size();
    }
  }
  return out;
}

/// Two-rule repetition-free HR grammar with a non-string right-hand side:
/// S -> triangle of S(0,1), S(1,2), c(0,2) and S -> a.
inline phr::HRGrammar triangle_grammar() {
  phr::Signature sig;
  const auto s = sig.add("S", 2);
  const auto a = sig.add("a", 2);
  const auto c = sig.add("c", 2);
  std::vector<phr::Rule> rules{
      {s, phr::Hypergraph(3, {{s, {0, 1}}, {s, {1, 2}}, {c, {0, 2}}}, {0, 2})},
      {s, phr::string_graph({a}, sig)},
  };
  return phr::HRGrammar(sig, {s}, s, rules);
}

}  // namespace support
