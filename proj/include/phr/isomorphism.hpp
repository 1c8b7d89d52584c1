#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

#include "phr/hypergraph.hpp"

namespace phr {

struct IsoWitness {
  std::vector<NodeId> node_map;       // source node -> target node
  std::vector<std::size_t> edge_map;  // source edge -> target edge
};

/// Checks the three commuting conditions: att, lab and ext are preserved, both maps bijective.
inline bool is_witness(const Hypergraph& g, const Hypergraph& h, const IsoWitness& w) {
  if (g.node_count() != h.node_count() || g.edge_count() != h.edge_count()) return false;
  if (w.node_map.size() != g.node_count() || w.edge_map.size() != g.edge_count()) return false;
  std::vector<bool> hit_v(h.node_count(), false);
  for (NodeId t : w.node_map) {
    if (t >= h.node_count() || hit_v[t]) return false;
    hit_v[t] = true;
  }
  std::vector<bool> hit_e(h.edge_count(), false);
  for (std::size_t t : w.edge_map) {
    if (t >= h.edge_count() || hit_e[t]) return false;
    hit_e[t] = true;
  }
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const Edge& a = g.edge(e);
    const Edge& b = h.edge(w.edge_map[e]);
    if (a.label != b.label || a.att.size() != b.att.size()) return false;
    for (std::size_t i = 0; i < a.att.size(); ++i) {
      if (w.node_map[a.att[i]] != b.att[i]) return false;
    }
  }
  if (g.ext().size() != h.ext().size()) return false;
  for (std::size_t i = 0; i < g.ext().size(); ++i) {
    if (w.node_map[g.ext()[i]] != h.ext()[i]) return false;
  }
  return true;
}

namespace detail {

/// Per-node invariant used only to prune candidate images: ext positions and the sorted
/// multiset of (label, position) incidences.
inline std::vector<std::vector<std::uint64_t>> node_profiles(const Hypergraph& h) {
  std::vector<std::vector<std::uint64_t>> prof(h.node_count());
  for (const Edge& e : h.edges()) {
    for (std::size_t p = 0; p < e.att.size(); ++p) {
      prof[e.att[p]].push_back((static_cast<std::uint64_t>(e.label) << 32) | p);
    }
  }
  for (auto& p : prof) std::sort(p.begin(), p.end());
  for (std::size_t i = 0; i < h.ext().size(); ++i) {
    prof[h.ext()[i]].push_back(0xffffffff00000000ull | i);
  }
  return prof;
}

class IsoSearch {
 public:
  IsoSearch(const Hypergraph& g, const Hypergraph& h)
      : g_(g), h_(h), pg_(node_profiles(g)), ph_(node_profiles(h)) {}

  std::optional<IsoWitness> run() {
    map_.assign(g_.node_count(), unmapped);
    used_.assign(h_.node_count(), false);
    for (std::size_t i = 0; i < g_.ext().size(); ++i) {
      const NodeId a = g_.ext()[i];
      const NodeId b = h_.ext()[i];
      if (map_[a] == unmapped) {
        if (used_[b]) return std::nullopt;
        map_[a] = b;
        used_[b] = true;
      } else if (map_[a] != b) {
        return std::nullopt;
      }
    }
    for (std::size_t v = 0; v < g_.node_count(); ++v) {
      if (map_[v] != unmapped && pg_[v] != ph_[map_[v]]) return std::nullopt;
    }
    if (extend(0)) return witness_;
    return std::nullopt;
  }

 private:
  static constexpr NodeId unmapped = static_cast<NodeId>(-1);

  bool extend(NodeId v) {
    while (v < g_.node_count() && map_[v] != unmapped) ++v;
    if (v == g_.node_count()) return match_edges();
    for (NodeId t = 0; t < h_.node_count(); ++t) {
      if (used_[t] || pg_[v] != ph_[t]) continue;
      map_[v] = t;
      used_[t] = true;
      if (extend(v + 1)) return true;
      map_[v] = unmapped;
      used_[t] = false;
    }
    return false;
  }

  // With the node map fixed, edges match iff the mapped edge multisets agree.
  bool match_edges() {
    std::map<Edge, std::vector<std::size_t>> pool;
    for (std::size_t e = 0; e < h_.edge_count(); ++e) pool[h_.edge(e)].push_back(e);
    IsoWitness w;
    w.node_map = map_;
    w.edge_map.resize(g_.edge_count());
    for (std::size_t e = 0; e < g_.edge_count(); ++e) {
      Edge image{g_.edge(e).label, {}};
      for (NodeId x : g_.edge(e).att) image.att.push_back(map_[x]);
      auto it = pool.find(image);
      if (it == pool.end() || it->second.empty()) return false;
      w.edge_map[e] = it->second.back();
      it->second.pop_back();
    }
    witness_ = std::move(w);
    return true;
  }

  const Hypergraph& g_;
  const Hypergraph& h_;
  std::vector<std::vector<std::uint64_t>> pg_;
  std::vector<std::vector<std::uint64_t>> ph_;
  std::vector<NodeId> map_;
  std::vector<bool> used_;
  IsoWitness witness_;
};

}  // namespace detail

/// An isomorphism from g to h, if one exists. Independent of canonical_form.
inline std::optional<IsoWitness> is_isomorphic(const Hypergraph& g, const Hypergraph& h) {
  if (g.node_count() != h.node_count() || g.edge_count() != h.edge_count() || g.type() != h.type()) {
    return std::nullopt;
  }
  return detail::IsoSearch(g, h).run();
}

}  // namespace phr
