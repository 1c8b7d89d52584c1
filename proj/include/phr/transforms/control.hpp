#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "phr/grammar.hpp"
#include "phr/transforms/builder.hpp"

namespace phr {

/// Equivalent uncontrolled grammar: the control automaton is determinized and completed,
/// its state is carried by a type-0 edge, and terminals are barred until a closing table.
///
/// Table 0 starts (S' -> bar(S•) ⊔ i•) and stops the simulation (accepting state -> ∅,
/// X̄ -> X•, everything else to failure). Table j simulates T_j on barred terminals and
/// advances the state edge by δ(·, j). When 0 is already a table index of the input, table j
/// becomes j + 1.
inline PHRGrammar remove_control(const ControlledPHRGrammar& cg) {
  const PHRGrammar& g = cg.underlying;
  const auto& sig = g.signature();
  const ControlAutomaton m = determinize_complete(cg.control);
  const std::size_t k = g.order();

  GrammarBuilder b;
  std::vector<LabelId> plain(sig.size());
  for (LabelId x = 0; x < sig.size(); ++x) plain[x] = b.label(sig.name(x), sig.arity(x));
  std::vector<LabelId> barred(sig.size());
  for (LabelId x = 0; x < sig.size(); ++x) {
    barred[x] = g.is_terminal(x) ? b.fresh(names::bar(sig.name(x)), sig.arity(x)) : plain[x];
  }
  std::vector<LabelId> state(m.state_count());
  for (StateId q = 0; q < m.state_count(); ++q) state[q] = b.fresh("$q" + std::to_string(q), 0);
  const LabelId start = b.fresh("$S", sig.arity(g.start()));
  b.make_failures(k);

  const bool shift = g.tables().count(0) != 0;
  auto index_of = [&](TableIndex j) { return shift ? j + 1 : j; };

  RuleMap& t0 = b.add_table(0, TableBase::none);
  t0[start] = {disjoint_union(b.handle(barred[g.start()]), b.handle(state[*m.initial()]))};
  for (StateId q = 0; q < m.state_count(); ++q) {
    t0[state[q]] = {m.is_final(q) ? Hypergraph() : b.failure_graph(0)};
  }
  for (LabelId x = 0; x < sig.size(); ++x) {
    if (g.is_terminal(x)) t0[barred[x]] = {b.handle(plain[x])};
    t0[plain[x]] = {b.failure_graph(sig.arity(x))};
  }
  for (std::size_t j = 0; j <= k; ++j) t0[b.failure(j)] = {b.failure_graph(j)};

  for (const auto& [j, t] : g.tables()) {
    RuleMap& tj = b.add_table(index_of(j), TableBase::none);
    for (LabelId x = 0; x < sig.size(); ++x) {
      auto& dst = tj[barred[x]];
      for (const auto& r : t.rules_for(x)) dst.push_back(map_labels(r, barred));
      if (g.is_terminal(x)) tj[plain[x]] = {b.handle(plain[x])};
    }
    for (StateId q = 0; q < m.state_count(); ++q) tj[state[q]] = {b.handle(state[m.step(q, j)])};
    tj[start] = {b.handle(start)};
    for (std::size_t f = 0; f <= k; ++f) tj[b.failure(f)] = {b.failure_graph(f)};
  }

  std::set<LabelId> terminals;
  for (LabelId a : g.terminals()) terminals.insert(plain[a]);
  return b.build(std::move(terminals), start, k);
}

}  // namespace phr
