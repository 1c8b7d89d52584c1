#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "phr/error.hpp"
#include "phr/signature.hpp"

namespace phr {

using NodeId = std::uint32_t;

struct Edge {
  LabelId label = 0;
  std::vector<NodeId> att;

  auto operator<=>(const Edge&) const = default;
};

/// A hypergraph over some signature: nodes 0..node_count()-1, edges indexed by position,
/// and a sequence of external nodes. Values are immutable once built; every operation
/// below returns a new hypergraph.
///
/// Construction does not check well-formedness so that malformed inputs can still be
/// reported by validate().
class Hypergraph {
 public:
  Hypergraph() = default;
  Hypergraph(std::size_t node_count, std::vector<Edge> edges, std::vector<NodeId> ext)
      : node_count_(node_count), edges_(std::move(edges)), ext_(std::move(ext)) {}

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Edge& edge(std::size_t e) const { return edges_.at(e); }
  const std::vector<NodeId>& ext() const noexcept { return ext_; }

  /// type(H) = |ext|
  std::size_t type() const noexcept { return ext_.size(); }

  bool repetition_free() const { return injective(ext_); }

  bool edge_proper(std::size_t e) const { return injective(edges_.at(e).att); }

  bool proper() const {
    return std::all_of(edges_.begin(), edges_.end(), [](const Edge& e) { return injective(e.att); });
  }

  bool operator==(const Hypergraph&) const = default;

 private:
  static bool injective(const std::vector<NodeId>& seq) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
      for (std::size_t j = i + 1; j < seq.size(); ++j) {
        if (seq[i] == seq[j]) return false;
      }
    }
    return true;
  }

  std::size_t node_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<NodeId> ext_;
};

enum class ViolationKind { dangling_node, arity_mismatch, unknown_label };

struct Violation {
  ViolationKind kind;
  std::string message;
};

/// Every reason `h` is not a hypergraph over `sig`; empty when it is one.
inline std::vector<Violation> validate(const Hypergraph& h, const Signature& sig) {
  std::vector<Violation> out;
  for (std::size_t e = 0; e < h.edge_count(); ++e) {
    const Edge& edge = h.edge(e);
    if (!sig.valid(edge.label)) {
      out.push_back({ViolationKind::unknown_label,
                     "edge " + std::to_string(e) + " has unknown label id " + std::to_string(edge.label)});
      continue;
    }
    if (edge.att.size() != sig.arity(edge.label)) {
      out.push_back({ViolationKind::arity_mismatch, "edge " + std::to_string(e) + " labelled '" +
                                                        sig.name(edge.label) + "' has " +
                                                        std::to_string(edge.att.size()) +
                                                        " attachment nodes, arity is " +
                                                        std::to_string(sig.arity(edge.label))});
    }
    for (NodeId v : edge.att) {
      if (v >= h.node_count()) {
        out.push_back({ViolationKind::dangling_node,
                       "edge " + std::to_string(e) + " attaches missing node " + std::to_string(v)});
      }
    }
  }
  for (std::size_t i = 0; i < h.ext().size(); ++i) {
    if (h.ext()[i] >= h.node_count()) {
      out.push_back({ViolationKind::dangling_node, "external position " + std::to_string(i + 1) +
                                                       " refers to missing node " +
                                                       std::to_string(h.ext()[i])});
    }
  }
  return out;
}

/// Throws GrammarError naming the first violation.
inline void require_valid(const Hypergraph& h, const Signature& sig) {
  auto v = validate(h, sig);
  if (!v.empty()) throw GrammarError(v.front().message);
}

/// w• : a path v0 -w1-> v1 ... -wn-> vn with ext = v0 vn. The empty word gives a single
/// node with ext v0 v0.
inline Hypergraph string_graph(std::span<const LabelId> word, const Signature& sig) {
  std::vector<Edge> edges;
  edges.reserve(word.size());
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (sig.arity(word[i]) != 2) {
      throw GrammarError("label '" + sig.name(word[i]) + "' has arity " + std::to_string(sig.arity(word[i])) +
                         ", string graphs need arity 2");
    }
    edges.push_back({word[i], {static_cast<NodeId>(i), static_cast<NodeId>(i + 1)}});
  }
  return Hypergraph(word.size() + 1, std::move(edges), {0, static_cast<NodeId>(word.size())});
}

inline Hypergraph string_graph(std::initializer_list<LabelId> word, const Signature& sig) {
  return string_graph(std::span<const LabelId>(word.begin(), word.size()), sig);
}

/// X• for a label of arity n: n external nodes and one edge attached to all of them.
inline Hypergraph handle_of(LabelId label, std::size_t arity) {
  std::vector<NodeId> nodes(arity);
  std::iota(nodes.begin(), nodes.end(), NodeId{0});
  return Hypergraph(arity, {Edge{label, nodes}}, nodes);
}

inline Hypergraph handle(LabelId label, const Signature& sig) {
  if (!sig.valid(label)) throw GrammarError("unknown label id " + std::to_string(label));
  return handle_of(label, sig.arity(label));
}

/// True when `h` is literally the handle of `label` (node numbering included).
inline bool is_handle_layout(const Hypergraph& h, LabelId label) {
  if (h.edge_count() != 1 || h.edge(0).label != label) return false;
  const auto n = h.edge(0).att.size();
  if (h.node_count() != n || h.ext().size() != n) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (h.edge(0).att[i] != i || h.ext()[i] != i) return false;
  }
  return true;
}

/// The n-node edgeless hypergraph whose ext lists every node once.
inline Hypergraph discrete_graph(std::size_t n) {
  std::vector<NodeId> nodes(n);
  std::iota(nodes.begin(), nodes.end(), NodeId{0});
  return Hypergraph(n, {}, nodes);
}

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // lowest ordinal wins
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

/// H[σ] where sigma[e] is the replacement of edge e, or nullptr to keep e.
/// Node order: nodes of H first, then the nodes of each replacement in edge order, quotiented
/// by the identification of attachment and external nodes. Replacement edges are spliced in
/// at the position of the edge they replace.
inline Hypergraph replace_edges(const Hypergraph& h, std::span<const Hypergraph* const> sigma) {
  std::vector<std::size_t> offset(h.edge_count(), 0);
  std::size_t total = h.node_count();
  bool merges = false;
  for (std::size_t e = 0; e < h.edge_count(); ++e) {
    if (const Hypergraph* r = sigma[e]) {
      offset[e] = total;
      total += r->node_count();
      merges = true;
    }
  }
  if (!merges) return h;

  UnionFind uf(total);
  for (std::size_t e = 0; e < h.edge_count(); ++e) {
    if (const Hypergraph* r = sigma[e]) {
      const auto& att = h.edge(e).att;
      for (std::size_t i = 0; i < att.size(); ++i) uf.unite(att[i], offset[e] + r->ext()[i]);
    }
  }
  std::vector<NodeId> renumber(total);
  std::vector<NodeId> rep_id(total, static_cast<NodeId>(-1));
  NodeId next = 0;
  for (std::size_t v = 0; v < total; ++v) {
    const auto root = uf.find(v);
    if (rep_id[root] == static_cast<NodeId>(-1)) rep_id[root] = next++;
    renumber[v] = rep_id[root];
  }

  std::vector<Edge> edges;
  edges.reserve(h.edge_count());
  for (std::size_t e = 0; e < h.edge_count(); ++e) {
    if (const Hypergraph* r = sigma[e]) {
      for (const Edge& re : r->edges()) {
        Edge out{re.label, {}};
        out.att.reserve(re.att.size());
        for (NodeId v : re.att) out.att.push_back(renumber[offset[e] + v]);
        edges.push_back(std::move(out));
      }
    } else {
      Edge out{h.edge(e).label, {}};
      out.att.reserve(h.edge(e).att.size());
      for (NodeId v : h.edge(e).att) out.att.push_back(renumber[v]);
      edges.push_back(std::move(out));
    }
  }
  std::vector<NodeId> ext;
  ext.reserve(h.ext().size());
  for (NodeId v : h.ext()) ext.push_back(renumber[v]);
  return Hypergraph(next, std::move(edges), std::move(ext));
}

}  // namespace detail

/// H[σ]: replaces each edge in the domain of `sigma` by its image. Throws GrammarError on a type
/// mismatch or an edge index outside H.
inline Hypergraph replace(const Hypergraph& h, const std::map<std::size_t, Hypergraph>& sigma) {
  std::vector<const Hypergraph*> slots(h.edge_count(), nullptr);
  for (const auto& [e, r] : sigma) {
    if (e >= h.edge_count()) throw GrammarError("replacement of missing edge " + std::to_string(e));
    if (r.type() != h.edge(e).att.size()) {
      throw GrammarError("replacement for edge " + std::to_string(e) + " has type " + std::to_string(r.type()) +
                         ", edge has type " + std::to_string(h.edge(e).att.size()));
    }
    slots[e] = &r;
  }
  return detail::replace_edges(h, slots);
}

/// G ⊔ H with ext = ext_G · ext_H.
inline Hypergraph disjoint_union(const Hypergraph& g, const Hypergraph& h) {
  const auto shift = static_cast<NodeId>(g.node_count());
  std::vector<Edge> edges = g.edges();
  for (const Edge& e : h.edges()) {
    Edge out{e.label, e.att};
    for (auto& v : out.att) v += shift;
    edges.push_back(std::move(out));
  }
  std::vector<NodeId> ext = g.ext();
  for (NodeId v : h.ext()) ext.push_back(v + shift);
  return Hypergraph(g.node_count() + h.node_count(), std::move(edges), std::move(ext));
}

/// Applies a label map to every edge; the structure is unchanged.
template <class LabelMap>
Hypergraph relabel(const Hypergraph& h, LabelMap&& map) {
  std::vector<Edge> edges = h.edges();
  for (auto& e : edges) e.label = map(e.label);
  return Hypergraph(h.node_count(), std::move(edges), h.ext());
}

/// STR, extended with labels read as the empty word. Returns the spelled word when `h` is a
/// string graph, nullopt otherwise.
inline std::optional<std::vector<LabelId>> str_extract(const Hypergraph& h,
                                                       const std::set<LabelId>& empty_labels = {}) {
  if (h.type() != 2) return std::nullopt;
  const NodeId first = h.ext()[0];
  const NodeId last = h.ext()[1];
  if (h.edge_count() == 0) {
    if (h.node_count() == 1 && first == last) return std::vector<LabelId>{};
    return std::nullopt;
  }
  if (h.node_count() != h.edge_count() + 1 || first == last) return std::nullopt;
  constexpr auto none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> out_edge(h.node_count(), none);
  std::vector<int> in_degree(h.node_count(), 0);
  for (std::size_t e = 0; e < h.edge_count(); ++e) {
    const auto& att = h.edge(e).att;
    if (att.size() != 2) return std::nullopt;
    if (out_edge[att[0]] != none) return std::nullopt;
    out_edge[att[0]] = e;
    if (++in_degree[att[1]] > 1) return std::nullopt;
  }
  if (in_degree[first] != 0) return std::nullopt;
  std::vector<LabelId> word;
  word.reserve(h.edge_count());
  NodeId at = first;
  for (std::size_t step = 0; step < h.edge_count(); ++step) {
    const auto e = out_edge[at];
    if (e == none) return std::nullopt;
    if (empty_labels.count(h.edge(e).label) == 0) word.push_back(h.edge(e).label);
    at = h.edge(e).att[1];
  }
  if (at != last || out_edge[last] != none) return std::nullopt;
  return word;
}

}  // namespace phr
