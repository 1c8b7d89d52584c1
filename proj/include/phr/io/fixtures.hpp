#pragma once

#include <functional>
#include <string>
#include <vector>

#include "phr/error.hpp"
#include "phr/grammar.hpp"
#include "phr/io/text_format.hpp"
#include "phr/transforms.hpp"

namespace phr {

/// PHR form of a document: HR grammars gain identity rules, ET0L grammars become string-graph
/// rules after removing erasing rules.
inline PHRGrammar as_phr(const GrammarDocument& doc) {
  if (const auto* g = std::get_if<PHRGrammar>(&doc.grammar)) return *g;
  if (const auto* h = std::get_if<HRGrammar>(&doc.grammar)) return hr_to_phr(*h);
  return et0l_to_phr(std::get<ET0LGrammar>(doc.grammar));
}

namespace fixtures {

/// One box of type 0 doubling every step: 2ⁿ boxes after n steps.
inline PHRGrammar fig5_squares() {
  Signature sig;
  const LabelId box = sig.add("box", 0);
  RuleMap rules{{box, {disjoint_union(handle(box, sig), handle(box, sig))}}};
  return PHRGrammar(sig, {box}, box, {{1, Table(sig, rules)}});
}

/// a -> aa in a single table: {a^(2^n)}.
inline ET0LGrammar a_pow2() {
  Signature sig;
  const LabelId a = sig.add("a", 2);
  return ET0LGrammar(sig, {a}, a, {{1, {{a, {{a, a}}}}}});
}

/// S -> ab | aSb | SS.
inline HRGrammar dyck_hr() {
  Signature sig;
  const LabelId s = sig.add("S", 2);
  const LabelId a = sig.add("a", 2);
  const LabelId b = sig.add("b", 2);
  std::vector<Rule> rules{{s, string_graph({a, b}, sig)}, {s, string_graph({a, s, b}, sig)}, {s, string_graph({s, s}, sig)}};
  return HRGrammar(sig, {s}, s, rules);
}

/// Word problem of ℤ = ⟨x⟩ with inverse letter `inv`: S -> xX | Xx | xSX | XSx | SS.
inline HRGrammar z_wp_hr(const std::string& x = "a", const std::string& inv = "A") {
  Signature sig;
  const LabelId s = sig.add("S", 2);
  const LabelId a = sig.add(x, 2);
  const LabelId b = sig.add(inv, 2);
  std::vector<Rule> rules{{s, string_graph({a, b}, sig)},
                          {s, string_graph({b, a}, sig)},
                          {s, string_graph({a, s, b}, sig)},
                          {s, string_graph({b, s, a}, sig)},
                          {s, string_graph({s, s}, sig)}};
  return HRGrammar(sig, {s}, s, rules);
}

inline PHRGrammar z_wp(const std::string& x = "a", const std::string& inv = "A") { return hr_to_phr(z_wp_hr(x, inv)); }

/// Word problem of the free group on a, b.
inline PHRGrammar f2_wp(Mode mode = Mode::general) { return free_product_wp(z_wp("a", "A"), z_wp("b", "B"), mode); }

/// {w h(w) | w Dyck over a, b} with h(a) = A, h(b) = B. A type-4 label T carries the pair of
/// segments (w, h(w)); S glues them end to start.
inline PHRGrammar copy_dyck_k() {
  Signature sig;
  const LabelId s = sig.add("S", 2);
  const LabelId t = sig.add("T", 4);
  const LabelId a = sig.add("a", 2);
  const LabelId b = sig.add("b", 2);
  const LabelId ha = sig.add("A", 2);
  const LabelId hb = sig.add("B", 2);
  std::vector<Rule> rules{
      {s, Hypergraph(3, {{t, {0, 1, 1, 2}}}, {0, 2})},
      {t, Hypergraph(6, {{a, {0, 1}}, {b, {1, 2}}, {ha, {3, 4}}, {hb, {4, 5}}}, {0, 2, 3, 5})},
      {t, Hypergraph(8, {{a, {0, 1}}, {t, {1, 2, 5, 6}}, {b, {2, 3}}, {ha, {4, 5}}, {hb, {6, 7}}}, {0, 3, 4, 7})},
      {t, Hypergraph(6, {{t, {0, 1, 3, 4}}, {t, {1, 2, 4, 5}}}, {0, 2, 3, 5})},
  };
  return hr_to_phr(HRGrammar(sig, {s, t}, s, rules, 4));
}

enum class AbControl { none, any, balanced };

/// Tables 1: S -> AB, A -> aA, B -> bB; 2: A -> a; 3: B -> b (all else idle). Under control
/// 1⁺(23 | 32) the language is {aⁿbⁿ | n ≥ 1}; under {1,2,3}* it is a⁺b⁺; the empty control
/// language generates nothing.
inline ControlledPHRGrammar ab_tables(AbControl kind) {
  Signature sig;
  const LabelId s = sig.add("S", 2);
  const LabelId big_a = sig.add("A", 2);
  const LabelId big_b = sig.add("B", 2);
  const LabelId a = sig.add("a", 2);
  const LabelId b = sig.add("b", 2);
  RuleMap t1 = override_rules(identity_rules(sig), {{s, {string_graph({big_a, big_b}, sig)}},
                                                     {big_a, {string_graph({a, big_a}, sig)}},
                                                     {big_b, {string_graph({b, big_b}, sig)}}});
  RuleMap t2 = override_rules(identity_rules(sig), {{big_a, {string_graph({a}, sig)}}});
  RuleMap t3 = override_rules(identity_rules(sig), {{big_b, {string_graph({b}, sig)}}});
  PHRGrammar g(sig, {a, b}, s, {{1, Table(sig, t1)}, {2, Table(sig, t2)}, {3, Table(sig, t3)}});
  ControlAutomaton m(g.indices());
  switch (kind) {
    case AbControl::none:
      m.set_initial(m.add_state("c0"));
      break;
    case AbControl::any: {
      const auto q = m.add_state("c0", true);
      m.set_initial(q);
      for (TableIndex i : g.indices()) m.add_transition(q, i, q);
      break;
    }
    case AbControl::balanced: {
      const auto c0 = m.add_state("c0");
      const auto c1 = m.add_state("c1");
      const auto c2 = m.add_state("c2");
      const auto c3 = m.add_state("c3");
      const auto c4 = m.add_state("c4", true);
      m.set_initial(c0);
      m.add_transition(c0, 1, c1);
      m.add_transition(c1, 1, c1);
      m.add_transition(c1, 2, c2);
      m.add_transition(c2, 3, c4);
      m.add_transition(c1, 3, c3);
      m.add_transition(c3, 2, c4);
      break;
    }
  }
  return ControlledPHRGrammar(std::move(g), std::move(m));
}

/// a*b*.
inline WordAutomaton a_star_b_star() {
  WordAutomaton m({"a", "b"});
  const auto p = m.add_state("p", true);
  const auto q = m.add_state("q", true);
  m.set_initial(p);
  m.add_transition(p, "a", p);
  m.add_transition(p, "b", q);
  m.add_transition(q, "b", q);
  return m;
}

inline GrammarDocument document(std::string name, std::string description, PHRGrammar g) {
  return GrammarDocument{std::move(name), std::move(description), std::move(g), std::nullopt};
}

inline GrammarDocument document(std::string name, std::string description, const ControlledPHRGrammar& g) {
  return GrammarDocument{std::move(name), std::move(description), g.underlying, g.control};
}

struct Fixture {
  std::string name;
  std::function<GrammarDocument()> make;
};

inline const std::vector<Fixture>& all() {
  static const std::vector<Fixture> list{
      {"fig5_squares", [] { return document("fig5_squares", "type-0 boxes doubling in parallel", fig5_squares()); }},
      {"a_pow2",
       [] { return GrammarDocument{"a_pow2", "ET0L grammar for a^(2^n)", a_pow2(), std::nullopt}; }},
      {"a_pow2_phr", [] { return document("a_pow2_phr", "PHR image of a_pow2", et0l_to_phr(a_pow2())); }},
      {"dyck_hr", [] { return GrammarDocument{"dyck_hr", "Dyck words over a, b", dyck_hr(), std::nullopt}; }},
      {"dyck_hr_phr", [] { return document("dyck_hr_phr", "PHR image of dyck_hr", hr_to_phr(dyck_hr())); }},
      {"copy_dyck_K", [] { return document("copy_dyck_K", "w followed by its capitalised copy, w Dyck", copy_dyck_k()); }},
      {"z_wp", [] { return document("z_wp", "word problem of Z over a, A", z_wp()); }},
      {"f2_wp", [] { return document("f2_wp", "word problem of the free group over a, A, b, B", f2_wp()); }},
      {"ab_tables", [] { return document("ab_tables", "1+(23|32) control: a^n b^n", ab_tables(AbControl::balanced)); }},
      {"ab_tables_any", [] { return document("ab_tables_any", "unrestricted control: a+ b+", ab_tables(AbControl::any)); }},
      {"ab_tables_none", [] { return document("ab_tables_none", "empty control language", ab_tables(AbControl::none)); }},
      {"dyck_ab_meet",
       [] {
         return document("dyck_ab_meet", "controlled intersection of dyck_hr_phr with a*b*",
                         rational_intersect_controlled(hr_to_phr(dyck_hr()), a_star_b_star()));
       }},
  };
  return list;
}

inline GrammarDocument get(const std::string& name) {
  for (const auto& f : all()) {
    if (f.name == name) return f.make();
  }
  throw Error("unknown fixture '" + name + "'");
}

}  // namespace fixtures
}  // namespace phr
