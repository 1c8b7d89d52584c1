#pragma once

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "phr/engine.hpp"
#include "phr/grammar.hpp"
#include "phr/transforms/builder.hpp"
#include "phr/transforms/control.hpp"
#include "phr/transforms/embed.hpp"
#include "phr/transforms/substitution.hpp"

namespace phr {

/// Refusal threshold for the number of node labellings of one right-hand side.
inline constexpr double max_choices_per_rule = 1e6;

/// Controlled grammar for (L ∩ L(M)) \ {ε}. Edges carry the automaton states of their
/// attachment nodes, (X, q1, ..., qn); tables 1..n lift the rules of G over every node
/// labelling consistent with the left-hand side, table 0 decodes (a, q1, q2) with
/// δ(q1, a) = q2 to a, and the control is {1, ..., n}⁺0.
inline ControlledPHRGrammar rational_intersect_controlled(const PHRGrammar& input, const WordAutomaton& fsa) {
  detail::check_string_grammar(input, "rational intersection");
  const PHRGrammar g = remove_unreachable(input);
  const auto& sig = g.signature();
  const WordAutomaton m = determinize_complete(fsa);
  const std::size_t nq = m.state_count();

  GrammarBuilder b;
  std::map<std::pair<LabelId, std::vector<StateId>>, LabelId> delta;
  auto lifted = [&](LabelId x, const std::vector<StateId>& qs) {
    auto it = delta.find({x, qs});
    if (it != delta.end()) return it->second;
    std::string name = "<" + sig.name(x);
    for (StateId q : qs) name += "|" + std::to_string(q);
    name += ">";
    const LabelId id = b.fresh(name, sig.arity(x));
    delta.emplace(std::make_pair(x, qs), id);
    return id;
  };
  const LabelId start = b.fresh("$S", 2);
  std::map<LabelId, LabelId> plain;  // terminal of G in A ∩ B -> output label
  for (LabelId a : g.terminals()) {
    if (m.alphabet().count(sig.name(a)) != 0 && sig.arity(a) == 2) plain[a] = b.label(sig.name(a), 2);
  }

  // enc((R, l)) for every l : V_R -> Q, grouped by the induced ext labelling.
  auto choices = [&](const Hypergraph& r, auto&& emit) {
    std::size_t internal = r.node_count();
    std::vector<bool> is_ext(r.node_count(), false);
    for (NodeId v : r.ext()) {
      if (!is_ext[v]) --internal;
      is_ext[v] = true;
    }
    if (std::pow(static_cast<double>(nq), static_cast<double>(internal)) > max_choices_per_rule) {
      throw TransformError("rational intersection: too many node labellings for one rule");
    }
    std::vector<StateId> l(r.node_count(), 0);
    while (true) {
      std::vector<Edge> edges;
      edges.reserve(r.edge_count());
      for (const Edge& e : r.edges()) {
        std::vector<StateId> qs;
        for (NodeId v : e.att) qs.push_back(l[v]);
        edges.push_back({lifted(e.label, qs), e.att});
      }
      std::vector<StateId> sigma;
      for (NodeId v : r.ext()) sigma.push_back(l[v]);
      emit(sigma, Hypergraph(r.node_count(), std::move(edges), r.ext()));
      std::size_t v = 0;
      while (v < l.size() && ++l[v] == nq) l[v++] = 0;
      if (v == l.size()) break;
    }
  };

  std::map<TableIndex, RuleMap> lifts;
  TableIndex n = 0;
  for (const auto& [i, t] : g.tables()) {
    RuleMap& dst = lifts[++n];
    for (LabelId x = 0; x < sig.size(); ++x) {
      for (const auto& r : t.rules_for(x)) {
        choices(r, [&](const std::vector<StateId>& sigma, Hypergraph h) { dst[lifted(x, sigma)].push_back(std::move(h)); });
      }
    }
  }
  std::vector<StateId> finals = m.finals();
  for (auto& [i, dst] : lifts) {
    for (StateId q : finals) dst[start].push_back(b.handle(lifted(g.start(), {*m.initial(), q})));
  }
  RuleMap& t0 = b.add_table(0, TableBase::identity);
  for (const auto& [a, out] : plain) {
    for (StateId q1 = 0; q1 < nq; ++q1) {
      t0[lifted(a, {q1, m.step(q1, sig.name(a))})] = {b.handle(out)};
    }
  }
  for (auto& [i, dst] : lifts) b.add_table(i, TableBase::identity) = std::move(dst);

  std::set<LabelId> terminals;
  for (const auto& [a, out] : plain) terminals.insert(out);
  PHRGrammar out = b.build(std::move(terminals), start, g.order());

  ControlAutomaton control(out.indices());
  const auto c0 = control.add_state("c0");
  const auto c1 = control.add_state("c1");
  const auto c2 = control.add_state("c2", true);
  control.set_initial(c0);
  for (TableIndex i = 1; i <= n; ++i) {
    control.add_transition(c0, i, c1);
    control.add_transition(c1, i, c1);
  }
  control.add_transition(c1, 0, c2);
  return ControlledPHRGrammar(std::move(out), std::move(control));
}

/// (L ∩ L(M)) \ {ε} as an uncontrolled grammar.
inline PHRGrammar rational_intersect(const PHRGrammar& g, const WordAutomaton& m) {
  return remove_control(rational_intersect_controlled(g, m));
}

/// Nondeterministic automaton for B̄* a B̄*.
inline WordAutomaton marked_letter_automaton(const std::string& a, const std::set<std::string>& barred) {
  std::set<std::string> alphabet = barred;
  alphabet.insert(a);
  WordAutomaton m(alphabet);
  const auto s0 = m.add_state("s0");
  const auto s1 = m.add_state("s1", true);
  m.set_initial(s0);
  m.add_transition(s0, a, s1);
  for (const auto& x : barred) {
    m.add_transition(s0, x, s0);
    m.add_transition(s1, x, s1);
  }
  return m;
}

/// φ⁻¹(L) \ {ε} for φ : B* -> A*, as ψ(h(L) ∩ K) with h(a) = B̄* a B̄*,
/// K = (⋃ φ(x) x̄)* and ψ erasing A and unbarring B̄. The result is never repetition-free
/// because ψ erases.
inline PHRGrammar inverse_hom(const PHRGrammar& g, const Homomorphism& phi) {
  const auto letters = terminal_names(g);
  for (const auto& [x, w] : phi) {
    for (const auto& a : w) {
      if (letters.count(a) == 0) throw TransformError("homomorphism image letter '" + a + "' is not a terminal");
    }
  }
  std::map<std::string, std::string> bar;
  std::set<std::string> taken = letters;
  for (const auto& [x, w] : phi) {
    std::string name = names::bar(x);
    while (taken.count(name) != 0) name += '\'';
    taken.insert(name);
    bar[x] = name;
  }
  std::set<std::string> barred;
  for (const auto& [x, name] : bar) barred.insert(name);

  SubstitutionSpec h;
  for (const auto& a : letters) h.emplace(a, regular_to_phr(marked_letter_automaton(a, barred)));
  const PHRGrammar marked = remove_unreachable(substitute(g, h, Mode::general));

  std::set<std::string> alphabet = letters;
  alphabet.insert(barred.begin(), barred.end());
  WordAutomaton k(alphabet);
  const auto home = k.add_state("k0", true);
  k.set_initial(home);
  for (const auto& [x, w] : phi) {
    StateId at = home;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const auto mid = k.add_state("k" + std::to_string(k.state_count()));
      k.add_transition(at, w[i], mid);
      at = mid;
    }
    k.add_transition(at, bar.at(x), home);
  }
  const PHRGrammar meet = remove_unreachable(rational_intersect(marked, k));

  Homomorphism psi;
  for (const auto& a : letters) psi[a] = {};
  for (const auto& [x, name] : bar) psi[name] = {x};
  return apply_hom(meet, psi, Mode::general);
}

}  // namespace phr
