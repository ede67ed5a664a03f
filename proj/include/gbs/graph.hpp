// Graphs of cyclic groups: finite connected graphs where each half-edge h
// carries a nonzero integer label psi(h) attached to its terminal vertex.
// Edges are stored once with both half-edge labels; the half-edge (e, fwd)
// runs tail -> head and its label psi lives at the head.
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gbs/affine.hpp"

namespace gbs {

struct HalfEdge {
  std::string edge;
  bool rev = false;  // false: tail -> head, true: head -> tail

  bool operator==(const HalfEdge&) const = default;
  auto operator<=>(const HalfEdge&) const = default;

  HalfEdge bar() const { return {edge, !rev}; }
  std::string str() const { return edge + (rev ? ".rev" : ".fwd"); }
};

struct GbsGraph {
  struct Edge {
    std::string tail, head;
    AffineVector tail_label;  // psi of the reversed half-edge, lives at tail
    AffineVector head_label;  // psi of the forward half-edge, lives at head

    bool operator==(const Edge&) const = default;
  };

  std::set<std::string> vertices;
  std::map<std::string, Edge> edges;

  bool operator==(const GbsGraph&) const = default;

  bool has_edge(const std::string& id) const { return edges.count(id) > 0; }
  bool has_vertex(const std::string& v) const { return vertices.count(v) > 0; }

  const Edge& edge(const std::string& id) const {
    auto it = edges.find(id);
    if (it == edges.end()) throw std::invalid_argument("unknown edge: " + id);
    return it->second;
  }
  Edge& edge(const std::string& id) {
    auto it = edges.find(id);
    if (it == edges.end()) throw std::invalid_argument("unknown edge: " + id);
    return it->second;
  }

  // Half-edge accessors.  origin/terminus follow the orientation; label(h) is
  // psi(h), attached to terminus(h).
  const std::string& origin(const HalfEdge& h) const {
    const Edge& e = edge(h.edge);
    return h.rev ? e.head : e.tail;
  }
  const std::string& terminus(const HalfEdge& h) const {
    const Edge& e = edge(h.edge);
    return h.rev ? e.tail : e.head;
  }
  const AffineVector& label(const HalfEdge& h) const {
    const Edge& e = edge(h.edge);
    return h.rev ? e.tail_label : e.head_label;
  }
  AffineVector& label(const HalfEdge& h) {
    Edge& e = edge(h.edge);
    return h.rev ? e.tail_label : e.head_label;
  }
  void set_terminus(const HalfEdge& h, const std::string& v) {
    Edge& e = edge(h.edge);
    (h.rev ? e.tail : e.head) = v;
  }

  bool is_loop(const std::string& id) const {
    const Edge& e = edge(id);
    return e.tail == e.head;
  }

  // Both orientations of every edge, in lexicographic (edge id, fwd-first) order.
  std::vector<HalfEdge> half_edges() const {
    std::vector<HalfEdge> hs;
    for (auto& [id, e] : edges) {
      hs.push_back({id, false});
      hs.push_back({id, true});
    }
    return hs;
  }

  // Half-edges terminating at v (a loop contributes both orientations).
  std::vector<HalfEdge> half_edges_into(const std::string& v) const {
    std::vector<HalfEdge> hs;
    for (auto& [id, e] : edges) {
      if (e.head == v) hs.push_back({id, false});
      if (e.tail == v) hs.push_back({id, true});
    }
    return hs;
  }

  int degree(const std::string& v) const {
    int d = 0;
    for (auto& [id, e] : edges) {
      if (e.head == v) ++d;
      if (e.tail == v) ++d;
    }
    return d;
  }

  bool connected() const {
    if (vertices.empty()) return false;
    std::set<std::string> seen;
    std::vector<std::string> stack{*vertices.begin()};
    seen.insert(stack.back());
    while (!stack.empty()) {
      std::string v = stack.back();
      stack.pop_back();
      for (auto& [id, e] : edges) {
        for (const std::string* u : {&e.tail, &e.head}) {
          if ((e.tail == v || e.head == v) && !seen.count(*u)) {
            seen.insert(*u);
            stack.push_back(*u);
          }
        }
      }
    }
    return seen.size() == vertices.size();
  }

  // First Betti number |E| - |V| + 1 of a connected graph.
  long long rank() const {
    return static_cast<long long>(edges.size()) - static_cast<long long>(vertices.size()) + 1;
  }

  // Empty string when well-formed, otherwise a reason.
  std::string validate() const {
    if (vertices.empty()) return "graph has no vertices";
    for (auto& [id, e] : edges) {
      if (!vertices.count(e.tail)) return "edge " + id + " references unknown vertex " + e.tail;
      if (!vertices.count(e.head)) return "edge " + id + " references unknown vertex " + e.head;
      if (!e.tail_label.nonneg() || !e.head_label.nonneg())
        return "edge " + id + " has a label with negative exponent";
    }
    if (!connected()) return "graph is not connected";
    return "";
  }

  // All primes occurring in some label.
  std::set<long long> set_of_primes() const {
    std::set<long long> ps;
    for (auto& [id, e] : edges) {
      for (auto& [p, x] : e.tail_label.exps) ps.insert(p);
      for (auto& [p, x] : e.head_label.exps) ps.insert(p);
    }
    return ps;
  }

  // Fresh id helpers for moves that create vertices/edges.
  std::string fresh_vertex(const std::string& hint = "_v") const {
    for (long long i = 1;; ++i) {
      std::string c = hint + std::to_string(i);
      if (!vertices.count(c)) return c;
    }
  }
  std::string fresh_edge(const std::string& hint = "_e") const {
    for (long long i = 1;; ++i) {
      std::string c = hint + std::to_string(i);
      if (!edges.count(c)) return c;
    }
  }
};

// Orientation-normalized copy: each edge is stored with the lexicographically
// smaller (vertex, label) end as tail.  Reversing an edge names the same graph
// of groups, so equivalence compares canonical forms.
inline GbsGraph canonical(const GbsGraph& g) {
  GbsGraph h = g;
  for (auto& [id, e] : h.edges) {
    if (std::tie(e.head, e.head_label) < std::tie(e.tail, e.tail_label)) {
      std::swap(e.tail, e.head);
      std::swap(e.tail_label, e.head_label);
    }
  }
  return h;
}

inline bool equivalent(const GbsGraph& a, const GbsGraph& b) {
  return canonical(a) == canonical(b);
}

// A point of the affine representation: a vertex paired with an element of A+.
struct AffinePoint {
  std::string vertex;
  AffineVector coord;

  bool operator==(const AffinePoint&) const = default;
  auto operator<=>(const AffinePoint&) const = default;
};

// Affine representation Lambda: one affine edge per graph edge, running from
// (origin, factorization of the reverse label) to (terminus, factorization of
// the forward label).
struct AffineGraph {
  struct Edge {
    AffinePoint from, to;
    bool operator==(const Edge&) const = default;
  };
  std::set<std::string> vertices;
  std::map<std::string, Edge> edges;

  bool operator==(const AffineGraph&) const = default;
};

inline AffineGraph to_affine(const GbsGraph& g) {
  AffineGraph a;
  a.vertices = g.vertices;
  for (auto& [id, e] : g.edges)
    a.edges[id] = {{e.tail, e.tail_label}, {e.head, e.head_label}};
  return a;
}

inline GbsGraph from_affine(const AffineGraph& a) {
  GbsGraph g;
  g.vertices = a.vertices;
  for (auto& [id, e] : a.edges)
    g.edges[id] = {e.from.vertex, e.to.vertex, e.from.coord, e.to.coord};
  return g;
}

// Affine endpoints of a half-edge: its edge in Lambda runs from
// (origin(h), vec(label(bar h))) to (terminus(h), vec(label(h))).
inline AffinePoint affine_from(const GbsGraph& g, const HalfEdge& h) {
  return {g.origin(h), g.label(h.bar())};
}
inline AffinePoint affine_to(const GbsGraph& g, const HalfEdge& h) {
  return {g.terminus(h), g.label(h)};
}

}  // namespace gbs
