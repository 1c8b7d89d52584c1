#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "phr/grammar.hpp"
#include "phr/transforms/builder.hpp"
#include "phr/transforms/embed.hpp"

namespace phr {

/// Letter of the substituted language ↦ grammar of its image language.
using SubstitutionSpec = std::map<std::string, PHRGrammar>;

namespace detail {

inline bool start_is_clean(const PHRGrammar& g) {
  const LabelId s = g.start();
  for (const auto& [i, t] : g.tables()) {
    for (LabelId x = 0; x < g.signature().size(); ++x) {
      for (const auto& r : t.rules_for(x)) {
        if (x == s && is_handle_layout(r, s)) continue;
        for (const Edge& e : r.edges()) {
          if (e.label == s) return false;
        }
      }
    }
  }
  return true;
}

/// An equivalent grammar whose start label occurs in no right-hand side other than its own
/// handle: a fresh start takes one step of the old start's rules, or its handle when the old
/// start is terminal.
inline PHRGrammar with_clean_start(const PHRGrammar& g) {
  if (start_is_clean(g)) return g;
  Signature sig = g.signature();
  const LabelId old = g.start();
  const LabelId s = sig.add(sig.fresh_name("$S"), sig.arity(old));
  std::map<TableIndex, Table> tables;
  for (const auto& [i, t] : g.tables()) {
    RuleMap rules = t.rule_map();
    rules[s] = t.rules_for(old);
    if (g.is_terminal(old)) rules[s].push_back(handle_of(old, sig.arity(old)));
    tables.emplace(i, Table(sig, rules));
  }
  return PHRGrammar(std::move(sig), g.terminals(), s, std::move(tables), g.order());
}

inline void check_string_grammar(const PHRGrammar& g, const std::string& what) {
  if (g.signature().arity(g.start()) != 2) {
    throw TransformError(what + ": start label must have arity 2 to generate string graphs");
  }
}

inline PHRGrammar substitution_grammar(const PHRGrammar& g, const SubstitutionSpec& spec, Mode mode, bool iterate) {
  const auto& gsig = g.signature();
  check_string_grammar(g, "substituted grammar");
  for (LabelId a : g.terminals()) {
    if (spec.count(gsig.name(a)) == 0) {
      throw TransformError("terminal '" + gsig.name(a) + "' has no image in the substitution");
    }
  }
  std::set<std::string> target;
  std::size_t k = g.order();
  for (const auto& [a, img] : spec) {
    check_string_grammar(img, "image of '" + a + "'");
    for (LabelId x : img.terminals()) target.insert(img.signature().name(x));
    k = std::max(k, img.order());
    if (mode == Mode::repetition_free && !img.repetition_free()) {
      throw TransformError("image of '" + a + "' is not repetition-free");
    }
  }
  if (mode == Mode::repetition_free && !g.repetition_free()) {
    throw TransformError("substituted grammar is not repetition-free");
  }
  if (iterate) {
    for (const auto& x : target) {
      if (spec.count(x) == 0) throw TransformError("iterated substitution: '" + x + "' has no image");
    }
  }

  GrammarBuilder b;
  std::vector<LabelId> hat(gsig.size());
  for (LabelId x = 0; x < gsig.size(); ++x) hat[x] = b.fresh(names::hat(gsig.name(x)), gsig.arity(x));
  std::map<std::string, LabelId> plain;
  for (const auto& x : target) plain[x] = b.label(x, 2);
  if (iterate) {
    for (const auto& [a, img] : spec) plain[a] = b.label(a, 2);
  }

  struct Image {
    PHRGrammar g;
    std::vector<LabelId> bar;
  };
  std::map<std::string, Image> images;
  for (const auto& [a, raw] : spec) {
    Image im{with_clean_start(raw), {}};
    const auto& isig = im.g.signature();
    for (LabelId x = 0; x < isig.size(); ++x) im.bar.push_back(b.fresh(names::bar_in(a, isig.name(x)), isig.arity(x)));
    images.emplace(a, std::move(im));
  }
  b.make_failures(k);

  TableIndex next = 1;
  for (const auto& [i, t] : g.tables()) {
    RuleMap& dst = b.add_table(next++, TableBase::identity);
    for (LabelId x = 0; x < gsig.size(); ++x) {
      for (const auto& r : t.rules_for(x)) dst[hat[x]].push_back(map_labels(r, hat));
    }
  }
  {
    RuleMap& inject = b.add_table(next++, TableBase::failure);
    for (LabelId a : g.terminals()) {
      const Image& im = images.at(gsig.name(a));
      inject[hat[a]] = {b.handle(im.bar[im.g.start()])};
    }
  }
  for (const auto& [a, im] : images) {
    const auto& isig = im.g.signature();
    const LabelId s = im.bar[im.g.start()];
    for (const auto& [j, t] : im.g.tables()) {
      RuleMap& dst = b.add_table(next++, TableBase::identity);
      for (LabelId x = 0; x < isig.size(); ++x) {
        for (const auto& r : t.rules_for(x)) dst[im.bar[x]].push_back(map_labels(r, im.bar));
      }
      dst[s].push_back(b.handle(s));
    }
    RuleMap& decode = b.add_table(next++, TableBase::identity);
    for (LabelId x = 0; x < isig.size(); ++x) {
      if (im.g.is_terminal(x)) {
        decode[im.bar[x]] = {b.handle(plain.at(isig.name(x)))};
      } else if (x != im.g.start()) {
        decode[im.bar[x]] = {b.failure_graph(isig.arity(x))};
      }
    }
  }
  std::set<LabelId> terminals;
  if (iterate) {
    RuleMap& exit = b.add_table(next++, TableBase::failure);
    for (LabelId a : g.terminals()) exit[hat[a]] = {b.handle(plain.at(gsig.name(a)))};
    RuleMap& restart = b.add_table(next++, TableBase::failure);
    for (const auto& [a, im] : images) restart[plain.at(a)] = {b.handle(im.bar[im.g.start()])};
    for (const auto& [a, im] : images) terminals.insert(plain.at(a));
  } else {
    for (const auto& x : target) terminals.insert(plain.at(x));
  }
  return b.build(std::move(terminals), hat[g.start()], k);
}

}  // namespace detail

/// Grammar for h(L) \ {ε}, where L is generated by `g` and h(a) by spec[a].
inline PHRGrammar substitute(const PHRGrammar& g, const SubstitutionSpec& spec, Mode mode = Mode::general) {
  return detail::substitution_grammar(g, spec, mode, false);
}

/// Grammar for ⋃ hⁿ(L) \ {ε}; requires every image letter to be in the domain of h.
/// Besides substitute's tables it has an exit table (n = 0) and a restart table that
/// sends every letter to the start of its image again.
inline PHRGrammar iterate_substitution(const PHRGrammar& g, const SubstitutionSpec& spec, Mode mode = Mode::general) {
  return detail::substitution_grammar(g, spec, mode, true);
}

enum class RationalOp { union_, concat, plus };

struct RationalOptions {
  bool empty_in_first = false;   // ε ∈ L1
  bool empty_in_second = false;  // ε ∈ L2
};

/// Regular core over letters X and Y for each rational operation, ε excluded.
inline WordAutomaton rational_core(RationalOp op, const RationalOptions& opts = {}) {
  WordAutomaton m(op == RationalOp::plus ? std::set<std::string>{"X"} : std::set<std::string>{"X", "Y"});
  const auto s0 = m.add_state("s0");
  m.set_initial(s0);
  const auto f = m.add_state("f", true);
  switch (op) {
    case RationalOp::union_:
      m.add_transition(s0, "X", f);
      m.add_transition(s0, "Y", f);
      break;
    case RationalOp::concat: {
      const auto s1 = m.add_state("s1");
      m.add_transition(s0, "X", s1);
      m.add_transition(s1, "Y", f);
      if (opts.empty_in_second) m.add_transition(s0, "X", f);
      if (opts.empty_in_first) m.add_transition(s0, "Y", f);
      break;
    }
    case RationalOp::plus:
      m.add_transition(s0, "X", f);
      m.add_transition(f, "X", f);
      break;
  }
  return m;
}

/// L1 ∪ L2, L1 L2 or L1⁺ as the image of a regular core language under X ↦ L1, Y ↦ L2.
inline PHRGrammar rational_ops(const PHRGrammar& g1, const PHRGrammar& g2, RationalOp op, const RationalOptions& opts = {},
                               Mode mode = Mode::general) {
  SubstitutionSpec spec{{"X", g1}};
  if (op != RationalOp::plus) spec.emplace("Y", g2);
  return substitute(regular_to_phr(rational_core(op, opts)), spec, mode);
}

inline PHRGrammar rational_plus(const PHRGrammar& g1, Mode mode = Mode::general) {
  return rational_ops(g1, g1, RationalOp::plus, {}, mode);
}

/// φ(L) \ {ε}. Erasing letters map to the merge graph ε•, which needs general mode.
inline PHRGrammar apply_hom(const PHRGrammar& g, const Homomorphism& phi, Mode mode = Mode::general) {
  SubstitutionSpec spec;
  for (LabelId a : g.terminals()) {
    const auto& name = g.signature().name(a);
    auto it = phi.find(name);
    if (it == phi.end()) throw TransformError("homomorphism is undefined on '" + name + "'");
    if (it->second.empty() && mode == Mode::repetition_free) {
      throw TransformError("erasing image for '" + name + "' requires general mode");
    }
    spec.emplace(name, word_grammar(it->second));
  }
  return substitute(g, spec, mode);
}

}  // namespace phr
