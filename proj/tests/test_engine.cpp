#include <gtest/gtest.h>

#include "oracles.hpp"
#include "phr/engine.hpp"
#include "phr/io/fixtures.hpp"
#include "support.hpp"

using namespace phr;

namespace {

/// S -> ABC; table 1: A -> aA, B -> bB, C -> cC; table 2: A -> a, B -> b, C -> c.
ET0LGrammar anbncn() {
  Signature sig;
  const auto s = sig.add("S", 2);
  const auto big_a = sig.add("A", 2);
  const auto big_b = sig.add("B", 2);
  const auto big_c = sig.add("C", 2);
  const auto a = sig.add("a", 2);
  const auto b = sig.add("b", 2);
  const auto c = sig.add("c", 2);
  ET0LTable t1{{s, {{big_a, big_b, big_c}}}, {big_a, {{a, big_a}}}, {big_b, {{b, big_b}}}, {big_c, {{c, big_c}}},
               {a, {{a}}},
               {b, {{b}}},
               {c, {{c}}}};
  ET0LTable t2{{s, {{s}}}, {big_a, {{a}}}, {big_b, {{b}}}, {big_c, {{c}}}, {a, {{a}}}, {b, {{b}}}, {c, {{c}}}};
  return ET0LGrammar(sig, {a, b, c}, s, {{1, t1}, {2, t2}});
}

oracle::Strings spelled(const Signature& sig, const std::set<Word>& words) {
  oracle::Strings out;
  for (const auto& w : words) {
    if (!w.empty()) out.insert(spell(sig, w));
  }
  return out;
}

}  // namespace

TEST(Enumerate, Fig5Squares) {
  const auto g = fixtures::fig5_squares();
  Limits l;
  l.max_steps = 4;
  const auto r = enumerate_language(g, l);
  EXPECT_TRUE(r.exhaustive);
  std::multiset<std::size_t> counts;
  for (const auto& [k, h] : r.graphs) {
    counts.insert(h.edge_count());
    EXPECT_EQ(h.node_count(), 0u);
  }
  EXPECT_EQ(counts, (std::multiset<std::size_t>{1, 2, 4, 8, 16}));
  EXPECT_EQ(r.traces.size(), 5u);
  for (const auto& [k, h] : r.graphs) EXPECT_EQ(std::size_t{1} << r.traces.at(k).size(), h.edge_count());
}

TEST(Enumerate, Fig5StringsAreEmpty) {
  Limits l;
  l.max_steps = 4;
  EXPECT_TRUE(enumerate_strings(fixtures::fig5_squares(), l).words.empty());
}

TEST(Enumerate, SelfHandleStart) {
  Signature sig;
  const auto s = sig.add("S", 2);
  const Table t(sig, identity_rules(sig));
  const auto terminal = enumerate_language(PHRGrammar(sig, {s}, s, {{1, t}}));
  ASSERT_EQ(terminal.graphs.size(), 1u);
  EXPECT_EQ(terminal.graphs.begin()->first, canonical_key(handle(s, sig)));
  EXPECT_TRUE(terminal.saturated);
  const auto none = enumerate_language(PHRGrammar(sig, {}, s, {{1, t}}));
  EXPECT_TRUE(none.graphs.empty());
  EXPECT_TRUE(none.exhaustive);
}

TEST(Enumerate, DyckMatchesSequentialHr) {
  const auto hr = fixtures::dyck_hr();
  const auto expected = oracle::hr_strings(hr, 8);
  // both sides against the direct predicate
  EXPECT_EQ(expected, oracle::filter(oracle::all_words("ab", 8), [](const std::string& w) { return oracle::dyck(w); }));
  EXPECT_EQ(support::strings(hr_to_phr(hr), support::up_to_length(8)), expected);
}

TEST(Enumerate, APow2Strings) {
  Limits l;
  l.max_steps = 4;
  const auto g = et0l_to_phr(fixtures::a_pow2());
  const auto r = enumerate_strings(g, l);
  EXPECT_TRUE(r.exhaustive);
  EXPECT_EQ(spell_all(g.signature(), r.words),
            (oracle::Strings{"a", "aa", "aaaa", "aaaaaaaa", "aaaaaaaaaaaaaaaa"}));
}

TEST(Enumerate, AnBnCnMatchesEt0lRewriting) {
  const auto e = anbncn();
  const auto expected = spelled(e.signature(), oracle::et0l_words(e, 12, 9));
  EXPECT_EQ(expected, (oracle::Strings{"abc", "aabbcc", "aaabbbccc"}));
  EXPECT_EQ(support::strings(et0l_to_phr(e), support::up_to_length(9)), expected);
}

TEST(Member, APow2) {
  const auto g = et0l_to_phr(fixtures::a_pow2());
  const auto a = g.signature().id("a");
  Limits l;
  l.max_nodes = 32;
  l.max_edges = 32;
  l.max_steps = 32;
  const auto four = member_string(g, {a, a, a, a}, l);
  EXPECT_EQ(four.verdict, Verdict::yes);
  EXPECT_EQ(four.trace.size(), 2u);
  EXPECT_EQ(member_string(g, {a, a, a}, l).verdict, Verdict::no_within_limits);
  EXPECT_EQ(member_string(g, {}, l).verdict, Verdict::no_within_limits);
}

TEST(Member, BudgetGivesUnknown) {
  const auto g = hr_to_phr(fixtures::dyck_hr());
  const auto& sig = g.signature();
  Limits l;
  l.max_steps = 20;
  l.max_states = 3;
  const auto r = member_string(g, word_of(sig, {"a", "a", "b", "a", "b", "b"}), l);
  EXPECT_EQ(r.verdict, Verdict::unknown);
  l.max_states = 100000;
  EXPECT_EQ(member_string(g, word_of(sig, {"a", "a", "b", "a", "b", "b"}), l).verdict, Verdict::yes);
  EXPECT_EQ(member_string(g, word_of(sig, {"a", "b", "b", "a"}), l).verdict, Verdict::no_within_limits);
}

TEST(Enumerate, ResultCapClearsExhaustive) {
  Limits l = support::up_to_length(8);
  l.max_results = 3;
  const auto r = enumerate_language(hr_to_phr(fixtures::dyck_hr()), l);
  EXPECT_EQ(r.graphs.size(), 3u);
  EXPECT_FALSE(r.exhaustive);
  EXPECT_FALSE(r.saturated);
}

TEST(Enumerate, StepBoundIsReportedAsUnsaturated) {
  Limits l;
  l.max_steps = 2;
  const auto r = enumerate_language(fixtures::fig5_squares(), l);
  EXPECT_TRUE(r.exhaustive);
  EXPECT_FALSE(r.saturated);
  EXPECT_EQ(r.graphs.size(), 3u);
}

TEST(Enumerate, MonotoneInLimits) {
  const auto g = hr_to_phr(fixtures::dyck_hr());
  std::map<std::pair<std::size_t, std::size_t>, oracle::Strings> seen;
  for (std::size_t n = 2; n <= 8; n += 2) {
    for (std::size_t steps = 2; steps <= 5; ++steps) {
      const auto now = support::strings(g, support::up_to_length(n, steps));
      for (const auto& [key, before] : seen) {
        if (key.first <= n && key.second <= steps) {
          EXPECT_TRUE(std::includes(now.begin(), now.end(), before.begin(), before.end())) << n << " " << steps;
        }
      }
      seen[{n, steps}] = now;
    }
  }
}

TEST(Enumerate, Deterministic) {
  const auto g = fixtures::f2_wp();
  const auto l = support::up_to_length(4, 40);
  const auto r1 = enumerate_language(g, l);
  const auto r2 = enumerate_language(g, l);
  EXPECT_EQ(r1.graphs, r2.graphs);
  EXPECT_EQ(r1.traces, r2.traces);
  EXPECT_EQ(r1.states, r2.states);
}

TEST(Enumerate, ControlMatchesFilteredTraces) {
  for (auto kind : {fixtures::AbControl::none, fixtures::AbControl::any, fixtures::AbControl::balanced}) {
    const auto cg = fixtures::ab_tables(kind);
    const auto& g = cg.underlying;
    std::set<std::string> expected;
    std::vector<std::vector<TableIndex>> traces{{}};
    for (std::size_t len = 1; len <= 4; ++len) {
      std::vector<std::vector<TableIndex>> next;
      for (const auto& t : traces) {
        if (t.size() + 1 != len) continue;
        for (TableIndex i : g.indices()) {
          auto u = t;
          u.push_back(i);
          next.push_back(u);
        }
      }
      traces.insert(traces.end(), next.begin(), next.end());
    }
    for (const auto& t : traces) {
      if (!oracle::nfa_accepts(cg.control, t)) continue;
      for (const auto& [k, h] : trace_derive(g, g.start_graph(), t)) {
        if (g.terminally_labelled(h)) expected.insert(k);
      }
    }
    Limits l;
    l.max_steps = 4;
    const auto r = enumerate_language(cg, l);
    std::set<std::string> got;
    for (const auto& [k, h] : r.graphs) got.insert(k);
    EXPECT_EQ(got, expected);
    EXPECT_TRUE(r.exhaustive);
  }
}

TEST(Enumerate, BalancedControlGivesAnBn) {
  const auto cg = fixtures::ab_tables(fixtures::AbControl::balanced);
  EXPECT_EQ(support::strings(cg, support::up_to_length(8)), (oracle::Strings{"ab", "aabb", "aaabbb", "aaaabbbb"}));
  EXPECT_TRUE(support::strings(fixtures::ab_tables(fixtures::AbControl::none), support::up_to_length(8)).empty());
}

TEST(Enumerate, EmptyLabelsSpellEpsilon) {
  Signature sig;
  const auto s = sig.add("S", 2);
  const auto a = sig.add("a", 2);
  const auto e = sig.add("e", 2);
  const Table t(sig, override_rules(identity_rules(sig), {{s, {string_graph({a, e, a}, sig), string_graph({e}, sig)}}}));
  const PHRGrammar g(sig, {a, e}, s, {{1, t}});
  EXPECT_EQ(support::strings(g, support::up_to_length(4)), (oracle::Strings{"aea", "e"}));
  EXPECT_EQ(support::strings(g, support::up_to_length(4), {e}), (oracle::Strings{"aa"}));
}

TEST(RemoveUnreachable, DropsOrphanLabels) {
  Signature sig;
  const auto s = sig.add("S", 2);
  const auto z = sig.add("Z", 2);
  const auto a = sig.add("a", 2);
  const Table t(sig, override_rules(identity_rules(sig), {{s, {string_graph({a}, sig)}}, {z, {string_graph({a, a}, sig)}}}));
  const PHRGrammar g(sig, {a}, s, {{1, t}});
  const auto out = remove_unreachable(g);
  EXPECT_FALSE(out.signature().contains("Z"));
  EXPECT_EQ(out.signature().size(), 2u);
  EXPECT_EQ(support::strings(out, support::up_to_length(3)), support::strings(g, support::up_to_length(3)));
  const auto dyck = hr_to_phr(fixtures::dyck_hr());
  EXPECT_EQ(remove_unreachable(dyck), dyck);
}

TEST(RemoveUnreachable, ControlRemovalOutputEnumeratesIdentically) {
  const auto g = remove_control(fixtures::ab_tables(fixtures::AbControl::balanced));
  const auto clean = remove_unreachable(g);
  EXPECT_LE(clean.signature().size(), g.signature().size());
  for (std::size_t steps = 1; steps <= 5; ++steps) {
    EXPECT_EQ(support::strings(clean, support::up_to_length(6, steps)), support::strings(g, support::up_to_length(6, steps)));
  }
}

TEST(Enumerate, MergingGrammarNodeBoundIsNotAProof) {
  // S -> a S a | ε• merges nodes; the node bound cannot prune soundly
  Signature sig;
  const auto s = sig.add("S", 2);
  const auto a = sig.add("a", 2);
  const Table t(sig, override_rules(identity_rules(sig),
                                    {{s, {string_graph({a, s, a}, sig), string_graph(std::vector<LabelId>{}, sig)}}}));
  const PHRGrammar g(sig, {a}, s, {{1, t}});
  EXPECT_FALSE(g.repetition_free());
  Limits l = support::up_to_length(4, 8);
  l.max_nodes = 7;
  const auto r = enumerate_strings(g, l);
  EXPECT_EQ(spell_all(sig, r.words), (oracle::Strings{"aa", "aaaa"}));
  EXPECT_TRUE(r.exhaustive);
  l.max_nodes = 3;
  EXPECT_FALSE(enumerate_strings(g, l).exhaustive);
}
