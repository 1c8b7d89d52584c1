#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "phr/grammar.hpp"
#include "phr/transforms/builder.hpp"

namespace phr {

/// Single table 1 holding the HR rules plus (X, X•) for every label; terminals Σ \ N.
inline PHRGrammar hr_to_phr(const HRGrammar& g) {
  const auto& sig = g.signature();
  RuleMap rules = identity_rules(sig);
  for (const auto& r : g.rules()) rules[r.lhs].push_back(r.rhs);
  std::set<LabelId> terminals;
  for (LabelId x = 0; x < sig.size(); ++x) {
    if (g.nonterminals().count(x) == 0) terminals.insert(x);
  }
  std::map<TableIndex, Table> tables;
  tables.emplace(1, Table(sig, rules));
  return PHRGrammar(sig, std::move(terminals), g.start(), std::move(tables), g.order());
}

namespace detail {

inline std::set<LabelId> erasable_before(const ET0LTable& t, const std::set<LabelId>& after) {
  std::set<LabelId> out;
  for (const auto& [x, words] : t) {
    for (const auto& w : words) {
      if (std::all_of(w.begin(), w.end(), [&](LabelId y) { return after.count(y) != 0; })) {
        out.insert(x);
        break;
      }
    }
  }
  return out;
}

/// Nonempty subsequences of w obtained by deleting only symbols in `deletable`.
inline std::set<Word> kept_subsequences(const Word& w, const std::set<LabelId>& deletable) {
  std::set<Word> current{Word{}};
  for (LabelId y : w) {
    std::set<Word> next;
    for (const auto& prefix : current) {
      Word keep = prefix;
      keep.push_back(y);
      next.insert(std::move(keep));
      if (deletable.count(y) != 0) next.insert(prefix);
    }
    current = std::move(next);
  }
  current.erase(Word{});
  return current;
}

}  // namespace detail

/// An equivalent ET0L grammar without ε right-hand sides, generating L(G) \ {ε}.
///
/// Every symbol occurrence is tagged with the set E of symbols that the remaining table
/// sequence can erase. Valid tags are the closure of {∅} under
/// pre_T(E) = {X | some (X, w) ∈ T has all symbols of w in E}, and one table is built per
/// (T, E'): an occurrence tagged pre_T(E') keeps a nonempty subsequence of a right-hand side,
/// deleting only symbols in E' and tagging the kept ones E'. A final table strips ∅ tags.
inline ET0LGrammar et0l_propagating(const ET0LGrammar& g) {
  if (g.propagating()) return g;
  const auto& sig = g.signature();

  std::set<std::set<LabelId>> tags{{}};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& e : std::set<std::set<LabelId>>(tags)) {
      for (const auto& [i, t] : g.tables()) grew = tags.insert(detail::erasable_before(t, e)).second || grew;
    }
  }

  Signature out;
  std::vector<LabelId> plain(sig.size());
  for (LabelId x = 0; x < sig.size(); ++x) plain[x] = out.add(sig.name(x), 2);
  std::map<std::pair<LabelId, std::set<LabelId>>, LabelId> tagged;
  auto tag_name = [&](LabelId x, const std::set<LabelId>& e) {
    std::string name = sig.name(x) + "@{";
    bool first = true;
    for (LabelId y : e) {
      if (!first) name += ',';
      name += sig.name(y);
      first = false;
    }
    return name + "}";
  };
  for (const auto& e : tags) {
    for (LabelId x = 0; x < sig.size(); ++x) tagged[{x, e}] = out.add(out.fresh_name(tag_name(x, e)), 2);
  }
  const LabelId start = out.add(out.fresh_name("$S"), 2);
  const LabelId fail = out.add(out.fresh_name("$fail"), 2);

  auto fail_everything = [&] {
    ET0LTable t;
    for (LabelId y = 0; y < out.size(); ++y) t[y] = {Word{fail}};
    return t;
  };

  std::map<TableIndex, ET0LTable> tables;
  TableIndex next = 1;
  for (const auto& [i, t] : g.tables()) {
    for (const auto& after : tags) {
      const auto before = detail::erasable_before(t, after);
      ET0LTable table = fail_everything();
      auto rewrite = [&](LabelId x) {
        std::set<Word> rhs;
        for (const auto& w : t.at(x)) {
          for (const auto& kept : detail::kept_subsequences(w, after)) {
            Word v;
            for (LabelId y : kept) v.push_back(tagged.at({y, after}));
            rhs.insert(std::move(v));
          }
        }
        return std::vector<Word>(rhs.begin(), rhs.end());
      };
      for (LabelId x = 0; x < sig.size(); ++x) {
        auto rhs = rewrite(x);
        if (!rhs.empty()) table[tagged.at({x, before})] = std::move(rhs);
      }
      if (auto rhs = rewrite(g.start()); !rhs.empty()) table[start] = std::move(rhs);
      tables.emplace(next++, std::move(table));
    }
  }
  ET0LTable decode = fail_everything();
  for (LabelId a : g.terminals()) decode[tagged.at({a, {}})] = {Word{plain[a]}};
  if (g.terminals().count(g.start()) != 0) decode[start] = {Word{plain[g.start()]}};
  tables.emplace(next, std::move(decode));

  std::set<LabelId> terminals;
  for (LabelId a : g.terminals()) terminals.insert(plain[a]);
  return ET0LGrammar(std::move(out), std::move(terminals), start, std::move(tables));
}

/// Each ET0L rule (L, w) becomes (L, w•) after removing ε right-hand sides.
inline PHRGrammar et0l_to_phr(const ET0LGrammar& input) {
  const ET0LGrammar g = et0l_propagating(input);
  const auto& sig = g.signature();
  std::map<TableIndex, Table> tables;
  for (const auto& [i, t] : g.tables()) {
    RuleMap rules;
    for (const auto& [x, words] : t) {
      for (const auto& w : words) rules[x].push_back(string_graph(w, sig));
    }
    tables.emplace(i, Table(sig, rules));
  }
  return PHRGrammar(sig, g.terminals(), g.start(), std::move(tables), 2);
}

/// Right-linear 2-PHR grammar for L(M) \ {ε}: state labels $r<i> with rules
/// q -> (a q')• for each transition and q -> a• when q' is final. Single table 1.
inline PHRGrammar regular_to_phr(const WordAutomaton& m) {
  GrammarBuilder b;
  std::map<std::string, LabelId> letter;
  for (const auto& a : m.alphabet()) letter[a] = b.label(a, 2);
  std::vector<LabelId> state(m.state_count());
  for (StateId q = 0; q < m.state_count(); ++q) state[q] = b.fresh("$r" + std::to_string(q), 2);
  LabelId start = 0;
  if (m.initial()) {
    start = state[*m.initial()];
  } else {
    start = b.fresh("$r", 2);
  }
  RuleMap& t = b.add_table(1, TableBase::identity);
  const auto& sig = b.signature();
  for (StateId q = 0; q < m.state_count(); ++q) {
    std::vector<Hypergraph> rhs;
    for (const auto& [a, targets] : m.transitions_from(q)) {
      for (StateId r : targets) {
        rhs.push_back(string_graph({letter.at(a), state[r]}, sig));
        if (m.is_final(r)) rhs.push_back(string_graph({letter.at(a)}, sig));
      }
    }
    if (!rhs.empty()) t[state[q]] = std::move(rhs);
  }
  std::set<LabelId> terminals;
  for (const auto& [a, x] : letter) terminals.insert(x);
  return b.build(std::move(terminals), start, 2);
}

/// 2-PHR grammar for the single word `letters`; the empty word gives the merge graph ε•,
/// which is not repetition-free.
inline PHRGrammar word_grammar(const std::vector<std::string>& letters) {
  GrammarBuilder b;
  const LabelId s = b.fresh("$s", 2);
  Word w;
  std::set<LabelId> terminals;
  for (const auto& a : letters) {
    const LabelId x = b.label(a, 2);
    w.push_back(x);
    terminals.insert(x);
  }
  RuleMap& t = b.add_table(1, TableBase::identity);
  t[s] = {string_graph(w, b.signature())};
  return b.build(std::move(terminals), s, 2);
}

}  // namespace phr
