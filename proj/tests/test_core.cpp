#include <gtest/gtest.h>

#include "oracles.hpp"
#include "phr/canonical.hpp"
#include "phr/grammar.hpp"
#include "phr/hypergraph.hpp"
#include "phr/isomorphism.hpp"
#include "phr/transforms/builder.hpp"

using namespace phr;

namespace {

struct Sample {
  Signature sig;
  LabelId x, y;
  Hypergraph h, r, expected;

  Sample() {
    x = sig.add("X", 3);
    y = sig.add("Y", 2);
    // v1..v4 -> 0..3, ext v1 v4
    h = Hypergraph(4, {{x, {0, 1, 2}}, {y, {2, 3}}, {y, {1, 3}}}, {0, 3});
    r = Hypergraph(3, {{x, {0, 1, 2}}}, {0, 2});
    // e2 replaced: v5 -> 4
    expected = Hypergraph(5, {{x, {0, 1, 2}}, {y, {1, 3}}, {x, {2, 4, 3}}}, {0, 3});
  }
};

}  // namespace

TEST(Signature, RejectsDuplicatesAndBadNames) {
  Signature sig;
  sig.add("a", 2);
  EXPECT_THROW(sig.add("a", 2), GrammarError);
  EXPECT_THROW(sig.add("", 1), GrammarError);
  EXPECT_THROW(sig.add("#x", 1), GrammarError);
  EXPECT_THROW(sig.add_or_get("a", 3), GrammarError);
  EXPECT_EQ(sig.add_or_get("a", 2), 0u);
  EXPECT_EQ(sig.fresh_name("a"), "a'");
}

TEST(Hypergraph, ValidateReportsEveryViolation) {
  Signature sig;
  const auto a = sig.add("a", 2);
  Hypergraph bad(2, {{a, {0}}, {a, {0, 5}}, {7, {0, 1}}}, {0, 3});
  const auto v = validate(bad, sig);
  ASSERT_EQ(v.size(), 4u);
  EXPECT_EQ(v[0].kind, ViolationKind::arity_mismatch);
  EXPECT_EQ(v[1].kind, ViolationKind::dangling_node);
  EXPECT_EQ(v[2].kind, ViolationKind::unknown_label);
  EXPECT_EQ(v[3].kind, ViolationKind::dangling_node);
  EXPECT_THROW(require_valid(bad, sig), GrammarError);
  EXPECT_TRUE(validate(string_graph({a, a}, sig), sig).empty());
}

TEST(Hypergraph, StringGraphsAndHandles) {
  Signature sig;
  const auto a = sig.add("a", 2);
  const auto b = sig.add("b", 2);
  const auto x = sig.add("X", 3);
  const auto ab = string_graph({a, b}, sig);
  EXPECT_EQ(ab.node_count(), 3u);
  EXPECT_EQ(ab.edge_count(), 2u);
  EXPECT_EQ(ab.ext(), (std::vector<NodeId>{0, 2}));
  EXPECT_TRUE(ab.repetition_free());

  const auto eps = string_graph(std::vector<LabelId>{}, sig);
  EXPECT_EQ(eps.node_count(), 1u);
  EXPECT_EQ(eps.ext(), (std::vector<NodeId>{0, 0}));
  EXPECT_FALSE(eps.repetition_free());

  const auto hx = handle(x, sig);
  EXPECT_EQ(hx.node_count(), 3u);
  EXPECT_EQ(hx.ext(), (std::vector<NodeId>{0, 1, 2}));
  EXPECT_TRUE(is_handle_layout(hx, x));
  EXPECT_THROW(handle(99, sig), GrammarError);

  // the handle of a letter and its one-letter string graph coincide
  EXPECT_TRUE(is_isomorphic(handle(a, sig), string_graph({a}, sig)).has_value());
}

TEST(Hypergraph, DisjointUnionConcatenatesExt) {
  Signature sig;
  const auto a = sig.add("a", 2);
  const auto u = disjoint_union(string_graph({a}, sig), string_graph({a, a}, sig));
  EXPECT_EQ(u.node_count(), 5u);
  EXPECT_EQ(u.edge_count(), 3u);
  EXPECT_EQ(u.ext(), (std::vector<NodeId>{0, 1, 2, 4}));
}

TEST(Replace, SampleGraph) {
  Sample f;
  const auto out = replace(f.h, {{1, f.r}});
  EXPECT_EQ(out.node_count(), 5u);
  EXPECT_EQ(out.edge_count(), 3u);
  EXPECT_EQ(out.ext().size(), 2u);
  EXPECT_TRUE(oracle::isomorphic(out, f.expected));
  EXPECT_EQ(canonical_key(out), canonical_key(f.expected));
}

TEST(Replace, TypeMismatchThrows) {
  Sample f;
  EXPECT_THROW(replace(f.h, {{0, f.r}}), GrammarError);
  EXPECT_THROW(replace(f.h, {{9, f.r}}), GrammarError);
}

TEST(Replace, MergesThroughRepeatedExt) {
  Signature sig;
  const auto a = sig.add("a", 2);
  const auto b = sig.add("b", 2);
  // a b with a replaced by the empty word: both nodes of a are identified
  const auto h = string_graph({a, b}, sig);
  const auto eps = string_graph(std::vector<LabelId>{}, sig);
  const auto out = replace(h, {{0, eps}});
  EXPECT_EQ(out.node_count(), 2u);
  ASSERT_EQ(out.edge_count(), 1u);
  EXPECT_EQ(str_extract(out), (std::optional<std::vector<LabelId>>{{b}}));
  // erasing both letters of "aa" leaves the ε graph
  const auto both = replace(string_graph({a, a}, sig), {{0, eps}, {1, eps}});
  EXPECT_EQ(both.node_count(), 1u);
  EXPECT_EQ(both.ext(), (std::vector<NodeId>{0, 0}));
}

TEST(StrExtract, Cases) {
  Signature sig;
  const auto a = sig.add("a", 2);
  const auto b = sig.add("b", 2);
  const auto e = sig.add("empty", 2);
  const auto x = sig.add("X", 3);
  EXPECT_EQ(str_extract(string_graph({a, b}, sig)), (std::optional<std::vector<LabelId>>{{a, b}}));
  EXPECT_FALSE(str_extract(handle(x, sig)).has_value());
  EXPECT_FALSE(str_extract(Hypergraph(2, {{a, {0, 1}}, {b, {1, 0}}}, {0, 1})).has_value());
  EXPECT_FALSE(str_extract(Hypergraph(3, {{a, {0, 1}}, {b, {0, 2}}}, {0, 2})).has_value());
  EXPECT_EQ(str_extract(string_graph({a, e, b}, sig), {e}), (std::optional<std::vector<LabelId>>{{a, b}}));
  EXPECT_EQ(str_extract(string_graph({e}, sig), {e}), (std::optional<std::vector<LabelId>>{std::vector<LabelId>{}}));
}

TEST(Isomorphism, WitnessAndAbsence) {
  Sample f;
  auto w = is_isomorphic(f.h, f.h);
  ASSERT_TRUE(w.has_value());
  EXPECT_TRUE(is_witness(f.h, f.h, *w));
  Hypergraph relabelled(4, {{f.x, {0, 1, 2}}, {f.y, {2, 3}}, {f.x, {1, 3, 2}}}, {0, 3});
  EXPECT_FALSE(is_isomorphic(f.h, relabelled).has_value());
  // swapping ext order breaks isomorphism of a one-edge path
  Signature sig;
  const auto a = sig.add("a", 2);
  EXPECT_FALSE(is_isomorphic(string_graph({a}, sig), Hypergraph(2, {{a, {0, 1}}}, {1, 0})).has_value());
}

TEST(Canonical, KeyIgnoresNodeAndEdgeOrder) {
  Sample f;
  Hypergraph shuffled(4, {{f.y, {1, 2}}, {f.x, {3, 0, 1}}, {f.y, {0, 2}}}, {3, 2});
  EXPECT_TRUE(oracle::isomorphic(f.h, shuffled));
  EXPECT_EQ(canonical_key(f.h), canonical_key(shuffled));
  const auto cf = canonical_form(shuffled);
  EXPECT_TRUE(oracle::isomorphic(cf.graph, f.h));
  EXPECT_EQ(canonical_form(cf.graph).graph, cf.graph);
}

TEST(Canonical, WalkThroughLoopIsNotAString) {
  Signature sig;
  const auto a = sig.add("a", 2);
  const Hypergraph looped(3, {{a, {0, 0}}, {a, {1, 0}}}, {1, 0});
  const auto path = string_graph({a, a}, sig);
  EXPECT_FALSE(oracle::isomorphic(looped, path));
  EXPECT_NE(canonical_key(looped), canonical_key(path));
  EXPECT_TRUE(oracle::isomorphic(canonical_form(looped).graph, looped));
}

TEST(Canonical, StringGraphsAgreeWithGeneralPath) {
  Signature sig;
  const auto a = sig.add("a", 2);
  const auto b = sig.add("b", 2);
  const auto ab = string_graph({a, b}, sig);
  // same path with permuted node ids takes the same key
  Hypergraph permuted(3, {{b, {0, 2}}, {a, {1, 0}}}, {1, 2});
  EXPECT_EQ(canonical_key(ab), canonical_key(permuted));
  EXPECT_NE(canonical_key(ab), canonical_key(string_graph({b, a}, sig)));
  // a path plus an isolated node is not a string graph
  Hypergraph extra(4, {{a, {0, 1}}, {b, {1, 2}}}, {0, 2});
  EXPECT_NE(canonical_key(ab), canonical_key(extra));
}

TEST(Automaton, DeterminizeAgreesWithNfa) {
  // (1|2)*0
  ControlAutomaton m({0, 1, 2});
  const auto p = m.add_state("p");
  const auto f = m.add_state("f", true);
  m.set_initial(p);
  m.add_transition(p, 1, p);
  m.add_transition(p, 2, p);
  m.add_transition(p, 0, f);
  const auto d = determinize_complete(m);
  EXPECT_TRUE(d.deterministic_complete());
  std::vector<std::vector<TableIndex>> words{{}};
  for (int len = 0; len < 6; ++len) {
    std::vector<std::vector<TableIndex>> next;
    for (const auto& w : words) {
      if (static_cast<int>(w.size()) != len) continue;
      for (TableIndex a : {0u, 1u, 2u}) {
        auto v = w;
        v.push_back(a);
        next.push_back(v);
      }
    }
    words.insert(words.end(), next.begin(), next.end());
  }
  for (const auto& w : words) EXPECT_EQ(d.accepts(w), oracle::nfa_accepts(m, w));
}

TEST(Automaton, EmptyLanguageHasSink) {
  ControlAutomaton m({1});
  m.set_initial(m.add_state("q"));
  const auto d = determinize_complete(m);
  EXPECT_TRUE(d.deterministic_complete());
  EXPECT_TRUE(d.finals().empty());
  EXPECT_TRUE(d.empty_language());
}

TEST(Table, LeftTotalityAndTypeChecks) {
  Signature sig;
  const auto s = sig.add("S", 2);
  const auto a = sig.add("a", 2);
  EXPECT_THROW(Table(sig, {{s, {string_graph({a}, sig)}}}), GrammarError);
  EXPECT_THROW(Table(sig, {{s, {handle_of(s, 3)}}, {a, {handle(a, sig)}}}), GrammarError);
  const Table t(sig, override_rules(identity_rules(sig), {{s, {string_graph({a}, sig), string_graph({a}, sig)}}}));
  EXPECT_EQ(t.rules_for(s).size(), 1u);  // isomorphic duplicates collapse
  EXPECT_EQ(t.rules_for(a).size(), 1u);
}

TEST(Table, OverrideReplacesOnlyNamedLabels) {
  Signature sig;
  const auto s = sig.add("S", 2);
  const auto a = sig.add("a", 2);
  const RuleMap base = identity_rules(sig);
  EXPECT_EQ(table_union_override(sig, base, {}), Table(sig, base));
  const Table t = table_union_override(sig, base, {{s, {string_graph({a, a}, sig)}}});
  EXPECT_EQ(t.rules_for(a), base.at(a));
  EXPECT_EQ(t.rules_for(s), (std::vector<Hypergraph>{string_graph({a, a}, sig)}));
}

TEST(Grammar, ConstructorChecks) {
  Signature sig;
  const auto s = sig.add("S", 2);
  const auto a = sig.add("a", 2);
  const Table t(sig, identity_rules(sig));
  EXPECT_THROW(PHRGrammar(sig, {a}, 9, {{1, t}}), GrammarError);
  EXPECT_THROW(PHRGrammar(sig, {a}, s, {}), GrammarError);
  EXPECT_THROW(PHRGrammar(sig, {a}, s, {{1, t}}, 1), GrammarError);
  EXPECT_EQ(PHRGrammar(sig, {a}, s, {{1, t}}).order(), 2u);
  EXPECT_THROW(HRGrammar(sig, {s}, a, {}), GrammarError);
  EXPECT_THROW(HRGrammar(sig, {s}, s, {{a, string_graph({a}, sig)}}), GrammarError);
  EXPECT_THROW(ET0LGrammar(sig, {a}, s, {{1, {{s, {{a}}}}}}), GrammarError);

  const PHRGrammar g(sig, {a}, s, {{1, t}});
  ControlAutomaton wrong({1, 2});
  wrong.set_initial(wrong.add_state("q"));
  EXPECT_THROW(ControlledPHRGrammar(g, wrong), GrammarError);
}

TEST(Derive, DirectDerivation) {
  Signature sig;
  const auto s = sig.add("S", 2);
  const auto a = sig.add("a", 2);
  const auto b = sig.add("b", 2);
  std::vector<Rule> rules{{s, string_graph({a, b}, sig)}, {s, string_graph({a, s, b}, sig)}, {s, string_graph({s, s}, sig)}};
  EXPECT_EQ(direct_derive(handle(s, sig), rules).size(), rules.size());
  const auto first = direct_derive(handle(s, sig), {rules[0]});
  ASSERT_EQ(first.size(), 1u);
  EXPECT_TRUE(oracle::isomorphic(first[0].result, rules[0].rhs));
  EXPECT_TRUE(direct_derive(string_graph({a, b}, sig), rules).empty());
}

TEST(Derive, ParallelDirectDerivation) {
  Signature sig;
  const auto box = sig.add("box", 0);
  const Table t(sig, {{box, {disjoint_union(handle(box, sig), handle(box, sig))}}});
  const auto one = parallel_direct_derive(handle(box, sig), t);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one.begin()->second.edge_count(), 2u);

  Hypergraph four(0, {{box, {}}, {box, {}}, {box, {}}, {box, {}}}, {});
  const auto eight = parallel_direct_derive(four, t);
  ASSERT_EQ(eight.size(), 1u);
  EXPECT_EQ(eight.begin()->second.edge_count(), 8u);

  const auto edgeless = parallel_direct_derive(discrete_graph(2), t);
  ASSERT_EQ(edgeless.size(), 1u);
  EXPECT_EQ(edgeless.begin()->first, canonical_key(discrete_graph(2)));
}

TEST(Derive, ChoiceFunctionsAreEnumerated) {
  Signature sig;
  const auto a = sig.add("a", 2);
  const auto b = sig.add("b", 2);
  const auto c = sig.add("c", 2);
  const Table t(sig, override_rules(identity_rules(sig), {{a, {string_graph({b}, sig), string_graph({c}, sig)}}}));
  // four choice functions, three iso classes after canonicalization (bc and cb are distinct)
  const auto out = parallel_direct_derive(string_graph({a, a}, sig), t);
  std::set<std::vector<LabelId>> words;
  for (const auto& [k, h] : out) words.insert(*str_extract(h));
  EXPECT_EQ(words, (std::set<std::vector<LabelId>>{{b, b}, {b, c}, {c, b}, {c, c}}));
}

TEST(Derive, TraceDerivation) {
  Signature sig;
  const auto box = sig.add("box", 0);
  const PHRGrammar g(sig, {box}, box, {{1, Table(sig, {{box, {disjoint_union(handle(box, sig), handle(box, sig))}}})}});
  const auto out = trace_derive(g, g.start_graph(), {1, 1, 1});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out.begin()->second.edge_count(), 8u);
  const auto none = trace_derive(g, g.start_graph(), {});
  ASSERT_EQ(none.size(), 1u);
  EXPECT_EQ(none.begin()->first, canonical_key(g.start_graph()));
  EXPECT_THROW(trace_derive(g, g.start_graph(), {2}), GrammarError);
}

TEST(Derive, Et0lStep) {
  Signature sig;
  const auto a = sig.add("a", 2);
  const auto b = sig.add("b", 2);
  const auto c = sig.add("c", 2);
  EXPECT_EQ(et0l_step({{a, {{a, a}}}}, {a}), (std::set<Word>{{a, a}}));
  EXPECT_EQ(et0l_step({{a, {{a, a}}}}, {}), (std::set<Word>{{}}));
  EXPECT_EQ(et0l_step({{a, {{b}, {c}}}}, {a, a}), (std::set<Word>{{b, b}, {b, c}, {c, b}, {c, c}}));
}

TEST(Builder, SpellUsesSpacesForLongNames) {
  Signature sig;
  const auto a = sig.add("a", 2);
  const auto bar = sig.add("~a", 2);
  EXPECT_EQ(spell(sig, {a, a}), "aa");
  EXPECT_EQ(spell(sig, {a, bar}), "a ~a");
}
