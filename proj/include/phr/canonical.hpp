#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "phr/hypergraph.hpp"

namespace phr {

/// Canonical representative of an isomorphism class. Two hypergraphs have equal keys iff
/// they are isomorphic; `graph` is the representative with canonical node and edge order.
struct CanonicalForm {
  std::string key;
  Hypergraph graph;
};

/// Iso classes keyed by canonical key; iteration follows key order.
using GraphSet = std::map<std::string, Hypergraph>;

namespace detail {

inline void put_varint(std::string& out, std::uint64_t x) {
  while (x >= 0x80) {
    out.push_back(static_cast<char>((x & 0x7f) | 0x80));
    x >>= 7;
  }
  out.push_back(static_cast<char>(x));
}

using Code = std::vector<std::uint32_t>;

/// One connected component, relabelled to local nodes 0..m-1.
struct LocalComponent {
  std::vector<NodeId> nodes;           // local -> global
  std::vector<std::size_t> edges;      // global edge indices
  std::vector<Edge> local_edges;       // att in local ids
  std::vector<std::vector<std::uint32_t>> ext_positions;  // per local node
};

/// Individualization-refinement search for the lexicographically least leaf code of a
/// component. Interchangeable nodes (a transposition of them is an automorphism) are only
/// tried once per cell.
class ComponentCanonizer {
 public:
  explicit ComponentCanonizer(const LocalComponent& c) : c_(c), m_(c.nodes.size()) {
    incidence_.resize(m_);
    for (std::size_t e = 0; e < c_.local_edges.size(); ++e) {
      const auto& att = c_.local_edges[e].att;
      for (std::size_t p = 0; p < att.size(); ++p) {
        incidence_[att[p]].emplace_back(static_cast<std::uint32_t>(e), static_cast<std::uint32_t>(p));
      }
    }
    sorted_edges_ = c_.local_edges;
    std::sort(sorted_edges_.begin(), sorted_edges_.end());
  }

  void run() {
    std::vector<std::uint32_t> colour(m_, 0);
    // initial colour: ext position list
    std::vector<std::vector<std::uint32_t>> initial(m_);
    for (std::size_t v = 0; v < m_; ++v) initial[v] = c_.ext_positions[v];
    rank_by(initial, colour);
    refine(colour);
    search(colour);
  }

  const Code& code() const { return best_; }
  const std::vector<std::uint32_t>& rank() const { return best_rank_; }

 private:
  template <class Key>
  static std::size_t rank_by(const std::vector<Key>& keys, std::vector<std::uint32_t>& colour) {
    std::vector<std::size_t> order(keys.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
    std::uint32_t next = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (i > 0 && keys[order[i - 1]] < keys[order[i]]) ++next;
      colour[order[i]] = next;
    }
    return order.empty() ? 0 : next + 1;
  }

  static std::size_t count_colours(const std::vector<std::uint32_t>& colour) {
    std::uint32_t top = 0;
    for (auto c : colour) top = std::max(top, c);
    return colour.empty() ? 0 : top + 1;
  }

  void refine(std::vector<std::uint32_t>& colour) const {
    std::size_t classes = count_colours(colour);
    std::vector<Code> sig(m_);
    std::vector<Code> tuples;
    while (classes < m_) {
      for (std::size_t v = 0; v < m_; ++v) {
        tuples.clear();
        for (auto [e, p] : incidence_[v]) {
          const Edge& edge = c_.local_edges[e];
          Code t;
          t.reserve(edge.att.size() + 2);
          t.push_back(edge.label);
          t.push_back(p);
          for (NodeId u : edge.att) t.push_back(colour[u]);
          tuples.push_back(std::move(t));
        }
        std::sort(tuples.begin(), tuples.end());
        Code& s = sig[v];
        s.clear();
        s.push_back(colour[v]);
        for (const auto& t : tuples) {
          s.push_back(static_cast<std::uint32_t>(t.size()));
          s.insert(s.end(), t.begin(), t.end());
        }
      }
      const std::size_t next = rank_by(sig, colour);
      if (next == classes) break;
      classes = next;
    }
  }

  bool transposition_is_automorphism(NodeId u, NodeId v) const {
    auto swap = [&](NodeId x) { return x == u ? v : (x == v ? u : x); };
    std::vector<Edge> moved = sorted_edges_;
    for (auto& e : moved) {
      for (auto& x : e.att) x = swap(x);
    }
    std::sort(moved.begin(), moved.end());
    return moved == sorted_edges_;
  }

  Code leaf_code(const std::vector<std::uint32_t>& colour) const {
    std::vector<NodeId> node_of(m_);
    for (std::size_t v = 0; v < m_; ++v) node_of[colour[v]] = static_cast<NodeId>(v);
    Code code;
    code.push_back(static_cast<std::uint32_t>(m_));
    for (std::size_t r = 0; r < m_; ++r) {
      const auto& pos = c_.ext_positions[node_of[r]];
      code.push_back(static_cast<std::uint32_t>(pos.size()));
      code.insert(code.end(), pos.begin(), pos.end());
    }
    std::vector<Code> tuples;
    tuples.reserve(c_.local_edges.size());
    for (const Edge& e : c_.local_edges) {
      Code t{e.label, static_cast<std::uint32_t>(e.att.size())};
      for (NodeId u : e.att) t.push_back(colour[u]);
      tuples.push_back(std::move(t));
    }
    std::sort(tuples.begin(), tuples.end());
    code.push_back(static_cast<std::uint32_t>(tuples.size()));
    for (const auto& t : tuples) code.insert(code.end(), t.begin(), t.end());
    return code;
  }

  void search(const std::vector<std::uint32_t>& colour) {
    // first non-singleton cell
    std::vector<std::uint32_t> cell_size(m_ + 1, 0);
    for (auto c : colour) ++cell_size[c];
    std::uint32_t target = 0;
    bool found = false;
    for (std::uint32_t c = 0; c < cell_size.size(); ++c) {
      if (cell_size[c] > 1) {
        target = c;
        found = true;
        break;
      }
    }
    if (!found) {
      Code code = leaf_code(colour);
      if (best_.empty() || code < best_) {
        best_ = std::move(code);
        best_rank_ = colour;
      }
      return;
    }
    std::vector<NodeId> tried;
    for (std::size_t v = 0; v < m_; ++v) {
      if (colour[v] != target) continue;
      const auto node = static_cast<NodeId>(v);
      bool redundant = false;
      for (NodeId u : tried) {
        if (transposition_is_automorphism(u, node)) {
          redundant = true;
          break;
        }
      }
      if (redundant) continue;
      tried.push_back(node);
      std::vector<std::uint32_t> next(m_);
      for (std::size_t w = 0; w < m_; ++w) {
        next[w] = 2 * colour[w] + ((colour[w] == target && w != v) ? 1u : 0u);
      }
      std::vector<std::uint32_t> dense(m_);
      rank_by(next, dense);
      refine(dense);
      search(dense);
    }
  }

  const LocalComponent& c_;
  std::size_t m_;
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> incidence_;
  std::vector<Edge> sorted_edges_;
  Code best_;
  std::vector<std::uint32_t> best_rank_;
};

inline std::vector<LocalComponent> split_components(const Hypergraph& h) {
  const std::size_t n = h.node_count();
  UnionFind uf(n);
  for (const Edge& e : h.edges()) {
    for (std::size_t i = 1; i < e.att.size(); ++i) uf.unite(e.att[0], e.att[i]);
  }
  std::vector<std::vector<std::uint32_t>> ext_pos(n);
  for (std::size_t i = 0; i < h.ext().size(); ++i) ext_pos[h.ext()[i]].push_back(static_cast<std::uint32_t>(i));

  std::vector<LocalComponent> comps;
  std::vector<std::size_t> comp_of_root(n, static_cast<std::size_t>(-1));
  std::vector<NodeId> local(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    const auto root = uf.find(v);
    if (comp_of_root[root] == static_cast<std::size_t>(-1)) {
      comp_of_root[root] = comps.size();
      comps.emplace_back();
    }
    auto& c = comps[comp_of_root[root]];
    local[v] = static_cast<NodeId>(c.nodes.size());
    c.nodes.push_back(static_cast<NodeId>(v));
    c.ext_positions.push_back(ext_pos[v]);
  }
  for (std::size_t e = 0; e < h.edge_count(); ++e) {
    const Edge& edge = h.edge(e);
    if (edge.att.empty()) {
      LocalComponent c;
      c.edges.push_back(e);
      c.local_edges.push_back(edge);
      comps.push_back(std::move(c));
      continue;
    }
    auto& c = comps[comp_of_root[uf.find(edge.att[0])]];
    c.edges.push_back(e);
    Edge le{edge.label, {}};
    for (NodeId v : edge.att) le.att.push_back(local[v]);
    c.local_edges.push_back(std::move(le));
  }
  return comps;
}

/// Label sequence of a string graph with at least one edge, read from ext[0] to ext[1].
inline bool string_labels(const Hypergraph& h, std::vector<LabelId>& out) {
  const std::size_t m = h.edge_count();
  if (m == 0 || h.ext().size() != 2 || h.node_count() != m + 1 || h.ext()[0] == h.ext()[1]) return false;
  constexpr auto unset = static_cast<std::uint32_t>(-1);
  std::vector<std::uint32_t> next(h.node_count(), unset);
  for (std::size_t e = 0; e < m; ++e) {
    const Edge& edge = h.edges()[e];
    if (edge.att.size() != 2 || next[edge.att[0]] != unset) return false;
    next[edge.att[0]] = static_cast<std::uint32_t>(e);
  }
  out.clear();
  std::vector<bool> seen(h.node_count(), false);
  NodeId v = h.ext()[0];
  seen[v] = true;
  for (std::size_t i = 0; i < m; ++i) {
    if (next[v] == unset) return false;
    const Edge& edge = h.edges()[next[v]];
    out.push_back(edge.label);
    v = edge.att[1];
    if (seen[v]) return false;
    seen[v] = true;
  }
  return v == h.ext()[1];
}

inline Hypergraph string_form(const std::vector<LabelId>& word) {
  std::vector<Edge> edges;
  edges.reserve(word.size());
  for (std::size_t i = 0; i < word.size(); ++i) {
    edges.push_back({word[i], {static_cast<NodeId>(i), static_cast<NodeId>(i + 1)}});
  }
  return Hypergraph(word.size() + 1, std::move(edges), {0, static_cast<NodeId>(word.size())});
}

inline bool is_string_key(const std::string& key) { return !key.empty() && key[0] == '\x01'; }

/// Representative of a string-graph key.
inline Hypergraph string_key_graph(const std::string& key) {
  std::vector<LabelId> word;
  std::uint64_t x = 0;
  unsigned shift = 0;
  for (std::size_t i = 1; i < key.size(); ++i) {
    const auto byte = static_cast<unsigned char>(key[i]);
    x |= static_cast<std::uint64_t>(byte & 0x7f) << shift;
    shift += 7;
    if (byte < 0x80) {
      word.push_back(static_cast<LabelId>(x));
      x = 0;
      shift = 0;
    }
  }
  return string_form(word);
}

}  // namespace detail

/// Canonical key and representative of `h`. The input must be valid (no dangling node ids).
/// String graphs take a direct path: their key is the label sequence.
inline CanonicalForm canonical_form(const Hypergraph& h) {
  std::vector<LabelId> word;
  if (detail::string_labels(h, word)) {
    CanonicalForm out;
    out.key.push_back('\x01');
    for (LabelId x : word) detail::put_varint(out.key, x);
    out.graph = detail::string_form(word);
    return out;
  }
  auto comps = detail::split_components(h);
  struct Done {
    detail::Code code;
    std::vector<std::uint32_t> rank;
    std::size_t index;
  };
  std::vector<Done> done;
  done.reserve(comps.size());
  for (std::size_t i = 0; i < comps.size(); ++i) {
    detail::ComponentCanonizer canon(comps[i]);
    canon.run();
    done.push_back({canon.code(), canon.rank(), i});
  }
  std::sort(done.begin(), done.end(), [](const Done& a, const Done& b) { return a.code < b.code; });

  CanonicalForm out;
  out.key.push_back('\x00');
  detail::put_varint(out.key, h.node_count());
  detail::put_varint(out.key, h.edge_count());
  detail::put_varint(out.key, h.ext().size());
  detail::put_varint(out.key, done.size());

  std::vector<NodeId> new_id(h.node_count(), 0);
  std::vector<Edge> edges;
  edges.reserve(h.edge_count());
  NodeId base = 0;
  for (const Done& d : done) {
    detail::put_varint(out.key, d.code.size());
    for (auto x : d.code) detail::put_varint(out.key, x);
    const auto& comp = comps[d.index];
    for (std::size_t v = 0; v < comp.nodes.size(); ++v) new_id[comp.nodes[v]] = base + d.rank[v];
    std::vector<Edge> local;
    for (const Edge& e : comp.local_edges) {
      Edge out_edge{e.label, {}};
      for (NodeId v : e.att) out_edge.att.push_back(base + d.rank[v]);
      local.push_back(std::move(out_edge));
    }
    std::sort(local.begin(), local.end());
    for (auto& e : local) edges.push_back(std::move(e));
    base += static_cast<NodeId>(comp.nodes.size());
  }
  std::vector<NodeId> ext;
  ext.reserve(h.ext().size());
  for (NodeId v : h.ext()) ext.push_back(new_id[v]);
  out.graph = Hypergraph(h.node_count(), std::move(edges), std::move(ext));
  return out;
}

inline std::string canonical_key(const Hypergraph& h) { return canonical_form(h).key; }

/// Inserts the canonical representative of `h`; returns false if its class was present.
inline bool insert_canonical(GraphSet& set, const Hypergraph& h) {
  auto cf = canonical_form(h);
  return set.emplace(std::move(cf.key), std::move(cf.graph)).second;
}

}  // namespace phr
