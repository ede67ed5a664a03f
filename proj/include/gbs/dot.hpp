// DOT renderings for figures: the plain labeled graph, and the affine
// representation as one lattice box per vertex holding the endpoint points.
// Output is display-only and deterministic (edges in id order).
#pragma once

#include <map>
#include <sstream>
#include <string>

#include "gbs/graph.hpp"

namespace gbs {

namespace detail {

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

// Integer rendering when the exponents are nonnegative, vector notation
// otherwise (labels of intermediate graphs can leave the positive cone).
inline std::string label_text(const AffineVector& v) {
  if (v.nonneg()) {
    std::ostringstream os;
    os << vector_to_int(v);
    return os.str();
  }
  return to_string(v);
}

}  // namespace detail

// Undirected drawing with one "(m, n)" label per edge, m at the tail.
inline std::string to_dot(const GbsGraph& g, const std::string& name = "gbs") {
  std::ostringstream os;
  os << "graph \"" << detail::dot_escape(name) << "\" {\n";
  os << "  node [shape=circle];\n";
  for (const std::string& v : g.vertices) os << "  \"" << detail::dot_escape(v) << "\";\n";
  for (auto& [id, e] : g.edges) {
    os << "  \"" << detail::dot_escape(e.tail) << "\" -- \"" << detail::dot_escape(e.head)
       << "\" [label=\"" << detail::dot_escape(id) << ": (" << detail::label_text(e.tail_label)
       << ", " << detail::label_text(e.head_label) << ")\"];\n";
  }
  os << "}\n";
  return os.str();
}

// Affine representation: a cluster per vertex, one node per occurring point
// (listing only the primes that occur), and an edge per graph edge.
inline std::string affine_to_dot(const GbsGraph& g, const std::string& name = "affine") {
  AffineGraph a = to_affine(g);
  std::map<AffinePoint, std::string> node;
  for (auto& [id, e] : a.edges) {
    node.emplace(e.from, "");
    node.emplace(e.to, "");
  }
  int n = 0;
  for (auto& [p, nm] : node) nm = "p" + std::to_string(n++);

  std::ostringstream os;
  os << "graph \"" << detail::dot_escape(name) << "\" {\n";
  os << "  node [shape=point];\n";
  int c = 0;
  for (const std::string& v : a.vertices) {
    os << "  subgraph cluster" << c++ << " {\n";
    os << "    label=\"" << detail::dot_escape(v) << "\";\n";
    for (auto& [p, nm] : node) {
      if (p.vertex != v) continue;
      os << "    " << nm << " [shape=plaintext, label=\"" << detail::dot_escape(to_string(p.coord))
         << "\"];\n";
    }
    os << "  }\n";
  }
  for (auto& [id, e] : a.edges)
    os << "  " << node.at(e.from) << " -- " << node.at(e.to) << " [label=\""
       << detail::dot_escape(id) << "\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace gbs
