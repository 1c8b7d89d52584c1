#pragma once

#include <string>
#include <vector>

#include "phr/hypergraph.hpp"
#include "phr/signature.hpp"

namespace phr {

namespace detail {

inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

/// Graphviz rendering: nodes are circles (filled and annotated with their 1-based external
/// positions when external), hyperedges are labelled boxes with tentacles numbered by
/// attachment position.
inline std::string export_dot(const Hypergraph& h, const Signature& sig) {
  std::string out = "digraph H {\n";
  if (h.node_count() == 0 && h.edge_count() == 0) return out + "}\n";
  std::vector<std::string> positions(h.node_count());
  for (std::size_t i = 0; i < h.ext().size(); ++i) {
    auto& p = positions[h.ext()[i]];
    if (!p.empty()) p += ",";
    p += std::to_string(i + 1);
  }
  for (NodeId v = 0; v < h.node_count(); ++v) {
    out += "  v" + std::to_string(v) + " [shape=circle, label=\"\"";
    if (!positions[v].empty()) out += ", style=filled, xlabel=" + detail::dot_quote(positions[v]);
    out += "];\n";
  }
  for (std::size_t e = 0; e < h.edge_count(); ++e) {
    out += "  e" + std::to_string(e) + " [shape=box, label=" + detail::dot_quote(sig.name(h.edge(e).label)) + "];\n";
  }
  for (std::size_t e = 0; e < h.edge_count(); ++e) {
    const auto& att = h.edge(e).att;
    for (std::size_t i = 0; i < att.size(); ++i) {
      out += "  e" + std::to_string(e) + " -> v" + std::to_string(att[i]) + " [label=\"" + std::to_string(i + 1) +
             "\", arrowhead=none];\n";
    }
  }
  return out + "}\n";
}

}  // namespace phr
