// The isomorphism-preserving moves on graphs of cyclic groups: sign changes,
// elementary expansion/contraction, slide, induction, swap, connection.
// Every move has a precondition check returning a reason string (empty = ok),
// an apply, and an inverse expressed as a script of moves.
#pragma once

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "gbs/graph.hpp"

namespace gbs {

struct VertexSign {
  std::string v;
  bool operator==(const VertexSign&) const = default;
};
struct EdgeSign {
  std::string e;
  bool operator==(const EdgeSign&) const = default;
};
// Adds vertex new_vertex and edge new_edge from new_vertex to at, with label 1
// at new_vertex and label k at at.
struct Expand {
  std::string at;
  Int k = 0;
  std::string new_vertex, new_edge;
  bool operator==(const Expand&) const = default;
};
// Removes vertex v and its unique incident edge, whose label at v must be 1.
struct Contract {
  std::string v;
  bool operator==(const Contract&) const = default;
};
// Moves terminus(moved) across the edge of `along`: requires
// terminus(moved) == origin(along) and psi(bar along) | psi(moved).
struct Slide {
  HalfEdge moved, along;
  bool operator==(const Slide&) const = default;
};
// loop must be a loop half-edge with psi(bar loop) = 1, psi(loop) = n and
// ell | n^k; multiplies every other label at the loop's vertex by ell.
struct Induct {
  HalfEdge loop;
  Int ell = 0;
  long long k = 0;
  bool operator==(const Induct&) const = default;
};
// Two loops at a common vertex, oriented so psi(bar e1) = n, psi(e1) = l1*n,
// psi(bar e2) = m, psi(e2) = l2*m; exchanges the translation parts.
struct Swap {
  HalfEdge e1, e2;
  bool operator==(const Swap&) const = default;
};
// d terminates at the vertex of loop e; transports d across the loop and
// re-roots the loop at origin(d), with l1*l2 = l^k.
struct Connect {
  HalfEdge d, e;
  long long k = 0;
  bool operator==(const Connect&) const = default;
};

using Move = std::variant<VertexSign, EdgeSign, Expand, Contract, Slide, Induct, Swap, Connect>;
using MoveScript = std::vector<Move>;

namespace detail {
// ell as a vector divides n^k as a vector: supp(ell) in supp(n) and each
// exponent at most k times the one in n.  Signs are ignored.
inline bool divides_power(const AffineVector& ell, const AffineVector& n, long long k) {
  for (auto& [p, e] : ell.exps)
    if (e != 0 && (n.exp(p) == 0 || e > k * n.exp(p))) return false;
  return true;
}
}  // namespace detail

inline std::string check(const GbsGraph& g, const Move& m);

inline std::string check(const GbsGraph& g, const VertexSign& m) {
  if (!g.has_vertex(m.v)) return "unknown vertex " + m.v;
  return "";
}

inline std::string check(const GbsGraph& g, const EdgeSign& m) {
  if (!g.has_edge(m.e)) return "unknown edge " + m.e;
  return "";
}

inline std::string check(const GbsGraph& g, const Expand& m) {
  if (!g.has_vertex(m.at)) return "unknown vertex " + m.at;
  if (m.k == 0) return "expansion label must be nonzero";
  if (m.new_vertex.empty() || g.has_vertex(m.new_vertex))
    return "expansion vertex id unusable: " + m.new_vertex;
  if (m.new_edge.empty() || g.has_edge(m.new_edge))
    return "expansion edge id unusable: " + m.new_edge;
  return "";
}

inline std::string check(const GbsGraph& g, const Contract& m) {
  if (!g.has_vertex(m.v)) return "unknown vertex " + m.v;
  if (g.degree(m.v) != 1) return "vertex " + m.v + " does not have a unique half-edge";
  for (auto& [id, e] : g.edges) {
    if (e.tail == m.v || e.head == m.v) {
      const AffineVector& at_v = e.tail == m.v ? e.tail_label : e.head_label;
      if (!at_v.is_zero()) return "label at " + m.v + " is not 1";
    }
  }
  return "";
}

inline std::string check(const GbsGraph& g, const Slide& m) {
  if (!g.has_edge(m.moved.edge)) return "unknown edge " + m.moved.edge;
  if (!g.has_edge(m.along.edge)) return "unknown edge " + m.along.edge;
  if (m.moved.edge == m.along.edge) return "slide requires two distinct edges";
  if (g.terminus(m.moved) != g.origin(m.along))
    return "moved end is not at the origin of the slide edge";
  AffineVector n = g.label(m.along.bar());
  AffineVector ell = g.label(m.moved) - n;
  if (!ell.nonneg()) return "psi(" + m.along.bar().str() + ") does not divide psi(" + m.moved.str() + ")";
  return "";
}

inline std::string check(const GbsGraph& g, const Induct& m) {
  if (!g.has_edge(m.loop.edge)) return "unknown edge " + m.loop.edge;
  if (!g.is_loop(m.loop.edge)) return "induction edge is not a loop";
  if (!g.label(m.loop.bar()).is_zero()) return "psi(" + m.loop.bar().str() + ") is not 1";
  if (m.ell == 0) return "induction factor must be nonzero";
  if (m.k < 0) return "induction exponent must be nonnegative";
  if (!detail::divides_power(factorize(m.ell), g.label(m.loop), m.k))
    return "factor does not divide psi(" + m.loop.str() + ")^k";
  return "";
}

inline std::string check(const GbsGraph& g, const Swap& m) {
  if (!g.has_edge(m.e1.edge)) return "unknown edge " + m.e1.edge;
  if (!g.has_edge(m.e2.edge)) return "unknown edge " + m.e2.edge;
  if (m.e1.edge == m.e2.edge) return "swap requires two distinct loops";
  if (!g.is_loop(m.e1.edge) || !g.is_loop(m.e2.edge)) return "swap edges must be loops";
  if (g.edge(m.e1.edge).tail != g.edge(m.e2.edge).tail) return "loops are at different vertices";
  AffineVector a = g.label(m.e1.bar()), b = g.label(m.e2.bar());
  AffineVector w1 = g.label(m.e1) - a, w2 = g.label(m.e2) - b;
  if (!w1.nonneg()) return "psi(" + m.e1.bar().str() + ") does not divide psi(" + m.e1.str() + ")";
  if (!w2.nonneg()) return "psi(" + m.e2.bar().str() + ") does not divide psi(" + m.e2.str() + ")";
  AffineVector d = b - a;
  if (!d.nonneg()) return "psi(" + m.e1.bar().str() + ") does not divide psi(" + m.e2.bar().str() + ")";
  for (auto& [p, e] : d.exps) {
    if (e == 0) continue;
    if (w1.exp(p) == 0) return "m/n has a prime missing from l1";
    if (w2.exp(p) == 0) return "m/n has a prime missing from l2";
  }
  return "";
}

inline std::string check(const GbsGraph& g, const Connect& m) {
  if (!g.has_edge(m.d.edge)) return "unknown edge " + m.d.edge;
  if (!g.has_edge(m.e.edge)) return "unknown edge " + m.e.edge;
  if (m.d.edge == m.e.edge) return "connection requires two distinct edges";
  if (!g.is_loop(m.e.edge)) return "connection loop edge is not a loop";
  if (g.terminus(m.d) != g.edge(m.e.edge).tail)
    return "d does not terminate at the loop vertex";
  if (m.k < 0) return "connection exponent must be nonnegative";
  AffineVector n = g.label(m.e.bar());
  AffineVector lvec = g.label(m.e) - n;
  if (!lvec.nonneg()) return "psi(" + m.e.bar().str() + ") does not divide psi(" + m.e.str() + ")";
  AffineVector l1 = g.label(m.d) - n;
  if (!l1.nonneg()) return "psi(" + m.e.bar().str() + ") does not divide psi(" + m.d.str() + ")";
  AffineVector l2 = m.k * lvec - l1;
  if (!l2.nonneg()) return "l1 does not divide l^k";
  return "";
}

inline std::string check(const GbsGraph& g, const Move& m) {
  return std::visit([&](const auto& mm) { return check(g, mm); }, m);
}

namespace detail {
inline void require(const GbsGraph& g, const auto& m) {
  std::string r = check(g, m);
  if (!r.empty()) throw std::runtime_error("invalid move: " + r);
}
}  // namespace detail

inline GbsGraph apply(const GbsGraph& g, const VertexSign& m) {
  detail::require(g, m);
  GbsGraph h = g;
  for (auto& [id, e] : h.edges) {
    if (e.head == m.v) e.head_label.sign ^= 1;
    if (e.tail == m.v) e.tail_label.sign ^= 1;
  }
  return h;
}

inline GbsGraph apply(const GbsGraph& g, const EdgeSign& m) {
  detail::require(g, m);
  GbsGraph h = g;
  h.edge(m.e).tail_label.sign ^= 1;
  h.edge(m.e).head_label.sign ^= 1;
  return h;
}

inline GbsGraph apply(const GbsGraph& g, const Expand& m) {
  detail::require(g, m);
  GbsGraph h = g;
  h.vertices.insert(m.new_vertex);
  h.edges[m.new_edge] = {m.new_vertex, m.at, AffineVector{}, factorize(m.k)};
  return h;
}

inline GbsGraph apply(const GbsGraph& g, const Contract& m) {
  detail::require(g, m);
  GbsGraph h = g;
  for (auto it = h.edges.begin(); it != h.edges.end(); ++it) {
    if (it->second.tail == m.v || it->second.head == m.v) {
      h.edges.erase(it);
      break;
    }
  }
  h.vertices.erase(m.v);
  return h;
}

inline GbsGraph apply(const GbsGraph& g, const Slide& m) {
  detail::require(g, m);
  GbsGraph h = g;
  AffineVector ell = g.label(m.moved) - g.label(m.along.bar());
  h.set_terminus(m.moved, g.terminus(m.along));
  h.label(m.moved) = ell + g.label(m.along);
  return h;
}

inline GbsGraph apply(const GbsGraph& g, const Induct& m) {
  detail::require(g, m);
  GbsGraph h = g;
  const std::string v = g.edge(m.loop.edge).tail;
  AffineVector L = factorize(m.ell);
  for (auto& [id, e] : h.edges) {
    if (id == m.loop.edge) continue;
    if (e.head == v) e.head_label += L;
    if (e.tail == v) e.tail_label += L;
  }
  return h;
}

inline GbsGraph apply(const GbsGraph& g, const Swap& m) {
  detail::require(g, m);
  GbsGraph h = g;
  AffineVector a = g.label(m.e1.bar()), b = g.label(m.e2.bar());
  AffineVector w1 = g.label(m.e1) - a, w2 = g.label(m.e2) - b;
  h.label(m.e1.bar()) = b;
  h.label(m.e1) = b + w1;
  h.label(m.e2.bar()) = a;
  h.label(m.e2) = a + w2;
  return h;
}

inline GbsGraph apply(const GbsGraph& g, const Connect& m) {
  detail::require(g, m);
  GbsGraph h = g;
  const std::string v = g.edge(m.e.edge).tail;  // loop vertex
  const std::string u = g.origin(m.d);
  AffineVector n = g.label(m.e.bar());
  AffineVector mvec = g.label(m.d.bar());
  AffineVector lvec = g.label(m.e) - n;
  AffineVector l1 = g.label(m.d) - n;
  AffineVector l2 = m.k * lvec - l1;
  // d now runs v -> u with labels (n at v, l2*m at u); orientation of the
  // half-edge token is preserved: origin(m.d) becomes v.
  {
    GbsGraph::Edge& ed = h.edge(m.d.edge);
    if (m.d.rev) {
      ed.head = v;
      ed.tail = u;
      ed.head_label = n;
      ed.tail_label = l2 + mvec;
    } else {
      ed.tail = v;
      ed.head = u;
      ed.tail_label = n;
      ed.head_label = l2 + mvec;
    }
  }
  {
    GbsGraph::Edge& ee = h.edge(m.e.edge);
    ee.tail = u;
    ee.head = u;
    h.label(m.e.bar()) = mvec;
    h.label(m.e) = lvec + mvec;
  }
  return h;
}

inline GbsGraph apply(const GbsGraph& g, const Move& m) {
  return std::visit([&](const auto& mm) { return apply(g, mm); }, m);
}

// Inverse of m relative to pre-state g: a script s with replay(apply(g, m), s) == g.
inline MoveScript invert(const GbsGraph& g, const Move& m) {
  return std::visit(
      [&](const auto& mm) -> MoveScript {
        using T = std::decay_t<decltype(mm)>;
        if constexpr (std::is_same_v<T, VertexSign> || std::is_same_v<T, EdgeSign>) {
          return {mm};
        } else if constexpr (std::is_same_v<T, Expand>) {
          return {Contract{mm.new_vertex}};
        } else if constexpr (std::is_same_v<T, Contract>) {
          for (auto& [id, e] : g.edges) {
            if (e.tail == mm.v)
              return {Expand{e.head, vector_to_int(e.head_label), mm.v, id}};
            if (e.head == mm.v)
              return {Expand{e.tail, vector_to_int(e.tail_label), mm.v, id}};
          }
          throw std::runtime_error("invert: no edge at contracted vertex");
        } else if constexpr (std::is_same_v<T, Slide>) {
          return {Slide{mm.moved, mm.along.bar()}};
        } else if constexpr (std::is_same_v<T, Induct>) {
          // Multiply by n^k/ell, then divide everything at the vertex by n^k
          // with k slides across the loop per affected half-edge.
          MoveScript s;
          AffineVector n = g.label(mm.loop);
          AffineVector comp = mm.k * n - factorize(mm.ell);
          comp.sign = (mm.k * n.sign + factorize(mm.ell).sign) & 1;
          s.push_back(Induct{mm.loop, vector_to_int(comp), mm.k});
          const std::string v = g.edge(mm.loop.edge).tail;
          for (const HalfEdge& h : g.half_edges_into(v)) {
            if (h.edge == mm.loop.edge) continue;
            for (long long i = 0; i < mm.k; ++i) s.push_back(Slide{h, mm.loop.bar()});
          }
          return s;
        } else if constexpr (std::is_same_v<T, Swap>) {
          return {Swap{mm.e2, mm.e1}};
        } else {  // Connect
          return {Connect{mm.d, mm.e, mm.k}};
        }
      },
      m);
}

struct StepStatus {
  size_t index = 0;
  bool ok = false;
  std::string reason;
};

struct ReplayResult {
  GbsGraph graph;
  std::vector<StepStatus> steps;
  bool ok = true;
};

// Apply a script move by move; stops at the first invalid step.
inline ReplayResult replay(const GbsGraph& g, const MoveScript& s) {
  ReplayResult r{g, {}, true};
  for (size_t i = 0; i < s.size(); ++i) {
    std::string reason = check(r.graph, s[i]);
    if (!reason.empty()) {
      r.steps.push_back({i, false, reason});
      r.ok = false;
      return r;
    }
    r.graph = gbs::apply(r.graph, s[i]);
    r.steps.push_back({i, true, ""});
  }
  return r;
}

}  // namespace gbs
