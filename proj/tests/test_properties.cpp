#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "phr/engine.hpp"
#include "phr/isomorphism.hpp"
#include "phr/io/fixtures.hpp"
#include "support.hpp"

using namespace phr;

namespace {

struct Gen {
  std::mt19937 rng;
  Signature sig;
  LabelId a, x;

  explicit Gen(unsigned seed) : rng(seed) {
    a = sig.add("a", 2);
    x = sig.add("X", 3);
  }

  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

  std::vector<NodeId> nodes(std::size_t n, std::size_t k, bool distinct) {
    std::vector<NodeId> out;
    while (out.size() < k) {
      const auto v = static_cast<NodeId>(below(n));
      if (distinct && std::find(out.begin(), out.end(), v) != out.end()) continue;
      out.push_back(v);
    }
    return out;
  }

  /// Random hypergraph; `proper` forces injective attachments and ext.
  Hypergraph graph(std::size_t max_nodes, std::size_t max_edges, std::size_t type, bool proper) {
    const std::size_t n = std::max(type, std::size_t{1}) + below(max_nodes);
    std::vector<Edge> edges;
    const std::size_t m = below(max_edges + 1);
    for (std::size_t i = 0; i < m; ++i) {
      const LabelId l = below(2) == 0 ? a : x;
      const std::size_t k = sig.arity(l);
      if (proper && k > n) continue;
      edges.push_back({l, nodes(n, k, proper)});
    }
    return Hypergraph(n, std::move(edges), nodes(n, type, proper));
  }

  Hypergraph permuted(const Hypergraph& h) {
    std::vector<NodeId> perm(h.node_count());
    std::iota(perm.begin(), perm.end(), NodeId{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Edge> edges = h.edges();
    for (auto& e : edges) {
      for (auto& v : e.att) v = perm[v];
    }
    std::shuffle(edges.begin(), edges.end(), rng);
    std::vector<NodeId> ext = h.ext();
    for (auto& v : ext) v = perm[v];
    return Hypergraph(h.node_count(), std::move(edges), std::move(ext));
  }
};

}  // namespace

TEST(Properties, ReplaceInStagesEqualsCombined) {
  Gen gen(1);
  for (int iter = 0; iter < 300; ++iter) {
    const auto h = gen.graph(4, 4, gen.below(3), false);
    std::map<std::size_t, Hypergraph> first, second, all;
    for (std::size_t e = 0; e < h.edge_count(); ++e) {
      const auto type = h.edge(e).att.size();
      const auto r = gen.graph(3, 2, type, gen.below(2) == 0);
      switch (gen.below(3)) {
        case 0: first[e] = r; all[e] = r; break;
        case 1: second[e] = r; all[e] = r; break;
        default: break;
      }
    }
    const auto mid = replace(h, first);
    std::map<std::size_t, Hypergraph> shifted;
    std::size_t at = 0;
    for (std::size_t e = 0; e < h.edge_count(); ++e) {
      if (auto it = second.find(e); it != second.end()) shifted[at] = it->second;
      at += first.count(e) != 0 ? first.at(e).edge_count() : 1;
    }
    EXPECT_EQ(canonical_key(replace(mid, shifted)), canonical_key(replace(h, all))) << iter;
  }
}

TEST(Properties, ReplaceNodeCount) {
  Gen gen(2);
  for (int iter = 0; iter < 300; ++iter) {
    const auto h = gen.graph(5, 4, gen.below(3), true);
    std::map<std::size_t, Hypergraph> sigma;
    std::size_t expected = h.node_count();
    bool rf = true;
    for (std::size_t e = 0; e < h.edge_count(); ++e) {
      if (gen.below(2) == 0) continue;
      const auto type = h.edge(e).att.size();
      const auto r = gen.graph(3, 2, type, gen.below(4) != 0);
      rf = rf && r.repetition_free();
      expected += r.node_count() - type;
      sigma[e] = r;
    }
    const auto out = replace(h, sigma);
    if (rf) {
      EXPECT_EQ(out.node_count(), expected) << iter;
    } else {
      EXPECT_LE(out.node_count(), expected) << iter;
    }
    EXPECT_EQ(out.type(), h.type());
  }
}

TEST(Properties, ReplaceKeepsExt) {
  Gen gen(3);
  for (int iter = 0; iter < 300; ++iter) {
    const auto h = gen.graph(4, 4, 1 + gen.below(3), false);
    std::map<std::size_t, Hypergraph> sigma;
    bool rf = h.proper();
    for (std::size_t e = 0; e < h.edge_count(); ++e) {
      if (gen.below(2) == 0) continue;
      sigma[e] = gen.graph(3, 2, h.edge(e).att.size(), gen.below(2) == 0);
      rf = rf && sigma[e].repetition_free();
    }
    const auto out = replace(h, sigma);
    ASSERT_EQ(out.type(), h.type());
    for (std::size_t i = 0; i < h.type(); ++i) {
      for (std::size_t j = 0; j < h.type(); ++j) {
        if (h.ext()[i] == h.ext()[j]) EXPECT_EQ(out.ext()[i], out.ext()[j]);
      }
    }
    // without merges ext survives literally: nodes of H keep their numbers
    if (rf) EXPECT_EQ(out.ext(), h.ext()) << iter;
  }
}

TEST(Properties, CanonicalKeyMatchesIsomorphism) {
  Gen gen(4);
  std::vector<Hypergraph> pool;
  for (int iter = 0; iter < 150; ++iter) pool.push_back(gen.graph(4, 4, gen.below(3), false));
  for (int iter = 0; iter < 150; ++iter) pool.push_back(gen.permuted(pool[iter]));
  std::size_t same = 0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const auto ki = canonical_key(pool[i]);
    for (std::size_t j = i; j < pool.size(); ++j) {
      const bool iso = oracle::isomorphic(pool[i], pool[j]);
      EXPECT_EQ(ki == canonical_key(pool[j]), iso) << i << " " << j;
      EXPECT_EQ(is_isomorphic(pool[i], pool[j]).has_value(), iso) << i << " " << j;
      same += iso;
    }
  }
  EXPECT_GE(same, 300u);
}

TEST(Properties, CanonicalGraphIsIsomorphic) {
  Gen gen(5);
  for (int iter = 0; iter < 200; ++iter) {
    const auto h = gen.graph(6, 6, gen.below(4), false);
    const auto cf = canonical_form(h);
    EXPECT_TRUE(oracle::isomorphic(h, cf.graph));
    EXPECT_EQ(canonical_key(cf.graph), cf.key);
    EXPECT_EQ(canonical_key(gen.permuted(h)), cf.key);
  }
}

TEST(Properties, StrExtractInvertsStringGraph) {
  Signature sig;
  const auto a = sig.add("a", 2);
  const auto b = sig.add("b", 2);
  const auto c = sig.add("c", 2);
  for (const auto& s : oracle::all_words("abc", 6)) {
    Word w;
    for (char ch : s) w.push_back(ch == 'a' ? a : ch == 'b' ? b : c);
    EXPECT_EQ(str_extract(string_graph(w, sig)), w) << s;
    Word kept;
    for (LabelId l : w) {
      if (l != c) kept.push_back(l);
    }
    EXPECT_EQ(str_extract(string_graph(w, sig), {c}), kept) << s;
  }
}

TEST(Properties, TraceConcatenation) {
  std::mt19937 rng(6);
  const auto g = fixtures::ab_tables(fixtures::AbControl::any).underlying;
  const auto dyck = hr_to_phr(fixtures::dyck_hr());
  for (const PHRGrammar* gp : {&g, &dyck}) {
    const auto idx = gp->indices();
    const std::vector<TableIndex> pick(idx.begin(), idx.end());
    for (int iter = 0; iter < 20; ++iter) {
      std::vector<TableIndex> t1, t2;
      for (std::size_t i = rng() % 3; i > 0; --i) t1.push_back(pick[rng() % pick.size()]);
      for (std::size_t i = rng() % 2; i > 0; --i) t2.push_back(pick[rng() % pick.size()]);
      auto t = t1;
      t.insert(t.end(), t2.begin(), t2.end());
      GraphSet composed;
      for (const auto& [k, h] : trace_derive(*gp, gp->start_graph(), t1)) {
        for (const auto& [k2, h2] : trace_derive(*gp, h, t2)) composed.emplace(k2, h2);
      }
      const auto direct = trace_derive(*gp, gp->start_graph(), t);
      std::set<std::string> a, b;
      for (const auto& [k, h] : direct) a.insert(k);
      for (const auto& [k, h] : composed) b.insert(k);
      EXPECT_EQ(a, b);
    }
  }
}

TEST(Properties, ParallelStepOnEdgelessGraphIsIdentity) {
  const auto g = hr_to_phr(fixtures::dyck_hr());
  for (std::size_t n = 0; n <= 3; ++n) {
    const auto h = Hypergraph(n, {}, std::vector<NodeId>(n > 0 ? 2 : 0, 0));
    const auto out = parallel_direct_derive(h, g.table(1));
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out.begin()->first, canonical_key(h));
  }
}

TEST(Properties, ParallelAndSequentialReachability) {
  for (const auto& hr : {fixtures::dyck_hr(), support::triangle_grammar()}) {
    const auto g = hr_to_phr(hr);
    constexpr std::size_t k = 3;
    constexpr std::size_t max_edges = 12;
    // graph key -> fewest sequential steps that replay the parallel path reaching it
    std::map<std::string, std::size_t> parallel;
    std::map<std::string, std::pair<Hypergraph, std::size_t>> level;
    level.emplace(canonical_key(g.start_graph()), std::pair{g.start_graph(), std::size_t{0}});
    std::size_t deepest = 0;
    for (std::size_t step = 0; step <= k; ++step) {
      std::map<std::string, std::pair<Hypergraph, std::size_t>> next;
      for (const auto& [key, entry] : level) {
        const auto& [h, depth] = entry;
        auto [it, fresh] = parallel.emplace(key, depth);
        if (!fresh) it->second = std::min(it->second, depth);
        deepest = std::max(deepest, depth);
        if (step == k) continue;
        std::size_t rewritten = 0;
        for (const Edge& e : h.edges()) rewritten += hr.nonterminals().count(e.label);
        for (const auto& [k2, h2] : parallel_direct_derive(h, g.table(1))) {
          if (h2.edge_count() > max_edges) continue;
          auto [at, added] = next.emplace(k2, std::pair{h2, depth + rewritten});
          if (!added) at->second.second = std::min(at->second.second, depth + rewritten);
        }
      }
      level = std::move(next);
    }
    const auto seq = support::sequential_levels(g.start_graph(), hr.rules(), deepest);
    std::set<std::string> sequential_k, sequential_all;
    for (std::size_t n = 0; n < seq.size(); ++n) {
      for (const auto& [key, h] : seq[n]) {
        if (h.edge_count() > max_edges) continue;
        sequential_all.insert(key);
        if (n <= k) sequential_k.insert(key);
      }
    }
    // one parallel step is a sequence of sequential steps, one per rewritten edge
    for (const auto& [key, depth] : parallel) EXPECT_EQ(sequential_all.count(key), 1u) << depth;
    // idle edges keep their handle, so a sequential step is a parallel step
    for (const auto& key : sequential_k) EXPECT_EQ(parallel.count(key), 1u);
  }
}

TEST(Properties, ContextFreeness) {
  const auto triangle = support::check_context_freeness(support::triangle_grammar(), 4);
  EXPECT_EQ(triangle.mismatches, 0u);
  EXPECT_GT(triangle.graphs, 10u);
  const auto dyck = support::check_context_freeness(fixtures::dyck_hr(), 3);
  EXPECT_EQ(dyck.mismatches, 0u);
}

TEST(Properties, KeyArenaAgreesWithSet) {
  std::mt19937 rng(7);
  detail::KeyArena arena;
  std::set<std::string> ref;
  for (int iter = 0; iter < 20000; ++iter) {
    std::string k(rng() % 12, '\0');
    for (auto& c : k) c = static_cast<char>(rng() % 4);
    EXPECT_EQ(arena.contains(k), ref.count(k) != 0);
    EXPECT_EQ(arena.insert(k), ref.insert(k).second);
  }
  EXPECT_EQ(arena.size(), ref.size());
}

TEST(Properties, EnumerationAgreesWithTraceFolding) {
  // every graph found within max_steps arises from its recorded trace
  const auto g = fixtures::ab_tables(fixtures::AbControl::any).underlying;
  Limits l;
  l.max_steps = 5;
  const auto r = enumerate_language(g, l);
  for (const auto& [key, h] : r.graphs) {
    const auto& t = r.traces.at(key);
    EXPECT_LE(t.size(), 5u);
    EXPECT_EQ(trace_derive(g, g.start_graph(), t).count(key), 1u);
  }
}
