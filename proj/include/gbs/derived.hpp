// Derived moves: induction, swap and connection written as sequences of
// elementary expansions, slides and contractions, following the proof
// sequences.  Expansions are generated by simulation: each emitted move is
// checked and applied, so later steps can reference the names produced by
// earlier ones (re-created loops get fresh vertex/edge ids).
#pragma once

#include <map>

#include "gbs/moves.hpp"

namespace gbs {

// Incrementally builds a script, keeping the current graph in sync.
class ScriptBuilder {
 public:
  explicit ScriptBuilder(GbsGraph g) : g_(std::move(g)) {}

  const GbsGraph& graph() const { return g_; }
  const MoveScript& script() const { return script_; }

  void step(const Move& m) {
    std::string r = check(g_, m);
    if (!r.empty()) throw std::runtime_error("script builder: " + r + " [" + std::to_string(script_.size()) + "]");
    g_ = gbs::apply(g_, m);
    script_.push_back(m);
  }

  // Multiplies every label at the loop's vertex (other than the loop itself)
  // by L, using only expansions, slides and a contraction.  `loop` must be a
  // loop half-edge with label 1 at its origin end.  The loop and its vertex
  // are re-created under fresh names; returns the new loop token, oriented
  // with the 1-label at the origin again.
  HalfEdge emit_induction(HalfEdge loop, AffineVector L) {
    if (L.is_zero()) return loop;
    AffineVector n = g_.label(loop);
    AffineVector remaining = L;
    while (!remaining.is_zero()) {
      // Chunk w1 <= n, carrying the leftover sign bit.
      AffineVector w1;
      w1.sign = remaining.sign;
      for (auto& [p, e] : remaining.exps) {
        if (n.exp(p) == 0) throw std::runtime_error("emit_induction: factor support exceeds loop label");
        w1.set_exp(p, std::min(e, n.exp(p)));
      }
      loop = induction_round(loop, w1);
      remaining -= w1;
      n = g_.label(loop);
    }
    return loop;
  }

  // Divides every other label at the loop's vertex by L: multiply by
  // int(kn - L) via emit_induction, then k slides per half-edge across the
  // loop.  Every affected endpoint y must satisfy y >= L pointwise.
  HalfEdge emit_inverse_induction(HalfEdge loop, AffineVector L) {
    if (L.is_zero()) return loop;
    AffineVector n = g_.label(loop);
    long long k = 0;
    for (auto& [p, e] : L.exps) {
      if (e == 0) continue;
      if (n.exp(p) == 0) throw std::runtime_error("emit_inverse_induction: support exceeds loop label");
      k = std::max(k, (e + n.exp(p) - 1) / n.exp(p));
    }
    AffineVector comp = k * n - L;
    loop = emit_induction(loop, comp);
    const std::string v = g_.edge(loop.edge).tail;
    for (const HalfEdge& h : g_.half_edges_into(v)) {
      if (h.edge == loop.edge) continue;
      for (long long i = 0; i < k; ++i) step(Slide{h, loop.bar()});
    }
    return loop;
  }

 private:
  GbsGraph g_;
  MoveScript script_;

  // One proof round: translate every other endpoint at the loop vertex by w1,
  // where w1 <= psi(loop) componentwise.
  HalfEdge induction_round(HalfEdge loop, const AffineVector& w1) {
    const std::string v = g_.edge(loop.edge).tail;
    AffineVector w = g_.label(loop);
    std::string v2 = g_.fresh_vertex();
    std::string e2 = g_.fresh_edge();
    step(Expand{v, vector_to_int(w - w1), v2, e2});
    // {e2, true} is oriented from v into v2 with label 1 at v2.
    HalfEdge into_v2{e2, true};
    for (const HalfEdge& h : g_.half_edges_into(v)) {
      if (h.edge == loop.edge || h.edge == e2) continue;
      step(Slide{h, loop});       // a -> a + w
      step(Slide{h, into_v2});    // a + w -> a + w1, now at v2
    }
    // Move the loop itself: top end to (v2, w1), then the e2 end across it,
    // leaving e2 as the loop (v2,0)--(v2,w) and the old loop as the tree edge.
    step(Slide{loop, into_v2});
    step(Slide{HalfEdge{e2, false}, loop});
    step(Contract{v});
    // e2 is now a loop at v2 with label 1 at its tail.
    return {e2, false};
  }
};

struct Expansion {
  MoveScript script;
  GbsGraph result;  // replay(g, script)
  // Ids in `result` -> ids in apply(g, m); apply the renaming to `result` to
  // compare with the direct move.
  std::map<std::string, std::string> vertex_renames;
  std::map<std::string, std::string> edge_renames;
};

// Renamed copy used to assert replay equality against the direct apply.
inline GbsGraph renamed(const GbsGraph& g, const Expansion& x) {
  GbsGraph h;
  auto vname = [&](const std::string& v) {
    auto it = x.vertex_renames.find(v);
    return it == x.vertex_renames.end() ? v : it->second;
  };
  for (auto& v : g.vertices) h.vertices.insert(vname(v));
  for (auto& [id, e] : g.edges) {
    auto it = x.edge_renames.find(id);
    h.edges[it == x.edge_renames.end() ? id : it->second] =
        {vname(e.tail), vname(e.head), e.tail_label, e.head_label};
  }
  return h;
}

inline Expansion expand_induction(const GbsGraph& g, const Induct& m) {
  detail::require(g, m);
  ScriptBuilder sb(g);
  const std::string v0 = g.edge(m.loop.edge).tail;
  HalfEdge cur = sb.emit_induction(m.loop, factorize(m.ell));
  Expansion x{sb.script(), sb.graph(), {}, {}};
  if (cur.edge != m.loop.edge) x.edge_renames[cur.edge] = m.loop.edge;
  const std::string v1 = sb.graph().edge(cur.edge).tail;
  if (v1 != v0) x.vertex_renames[v1] = v0;
  return x;
}

inline Expansion expand_swap(const GbsGraph& g, const Swap& m) {
  detail::require(g, m);
  ScriptBuilder sb(g);
  const std::string v = g.edge(m.e1.edge).tail;
  AffineVector a = g.label(m.e1.bar());
  AffineVector w1 = g.label(m.e1) - a;
  AffineVector b = g.label(m.e2.bar());
  AffineVector w2 = g.label(m.e2) - b;
  AffineVector L = b - a;
  auto chunks = [](const AffineVector& num, const AffineVector& den) {
    long long k = 0;
    for (auto& [p, e] : num.exps)
      if (e != 0) k = std::max(k, (e + den.exp(p) - 1) / den.exp(p));
    return k;
  };
  long long k1 = chunks(L, w1), k2 = chunks(L, w2);
  std::string u = g.fresh_vertex();
  std::string d0 = g.fresh_edge();
  sb.step(Expand{v, vector_to_int(a), u, d0});
  HalfEdge into_u{d0, true};  // from v into u, label 1 at u
  // Move both loops over to u.
  sb.step(Slide{m.e1, into_u});
  sb.step(Slide{m.e1.bar(), into_u});
  sb.step(Slide{m.e2, into_u});
  sb.step(Slide{m.e2.bar(), into_u});
  // Raise the u-end of the tree edge to k1*w1 + k2*w2.
  for (long long i = 0; i < k1; ++i) sb.step(Slide{into_u, m.e1});
  for (long long i = 0; i < k2; ++i) sb.step(Slide{into_u, m.e2});
  // Translate by -(b-a) around e1, then by +(b-a) around e2.
  HalfEdge cur1 = sb.emit_inverse_induction(m.e1, L);
  HalfEdge cur2 = sb.emit_induction(m.e2, L);
  // Lower the tree edge back to 0: w1 steps first (k2*w2 >= b-a keeps the
  // divisibility), then w2 steps.
  for (long long i = 0; i < k1; ++i) sb.step(Slide{into_u, cur1.bar()});
  for (long long i = 0; i < k2; ++i) sb.step(Slide{into_u, cur2.bar()});
  // Carry everything back to v and remove the auxiliary vertex.
  HalfEdge back{d0, false};  // from u into v, label a at v
  sb.step(Slide{cur1, back});
  sb.step(Slide{cur1.bar(), back});
  sb.step(Slide{cur2, back});
  sb.step(Slide{cur2.bar(), back});
  sb.step(Contract{sb.graph().edge(d0).tail});
  Expansion x{sb.script(), sb.graph(), {}, {}};
  if (cur1.edge != m.e1.edge) x.edge_renames[cur1.edge] = m.e1.edge;
  if (cur2.edge != m.e2.edge) x.edge_renames[cur2.edge] = m.e2.edge;
  return x;
}

inline Expansion expand_connection(const GbsGraph& g, const Connect& m) {
  detail::require(g, m);
  ScriptBuilder sb(g);
  const std::string v = g.edge(m.e.edge).tail;
  AffineVector a = g.label(m.e.bar());
  AffineVector w = g.label(m.e) - a;
  AffineVector w1 = g.label(m.d) - a;
  AffineVector w2 = m.k * w - w1;
  std::string u = g.fresh_vertex();
  std::string d0 = g.fresh_edge();
  sb.step(Expand{v, vector_to_int(a), u, d0});
  HalfEdge into_u{d0, true};
  sb.step(Slide{m.e, into_u});
  sb.step(Slide{m.e.bar(), into_u});
  sb.step(Slide{m.d, into_u});
  // Translate the u-ends of d and the tree edge by w2.
  HalfEdge cur = sb.emit_induction(m.e, w2);
  // Lower d's end from k*w to 0 across the loop.
  for (long long i = 0; i < m.k; ++i) sb.step(Slide{m.d, cur.bar()});
  // Slide the loop and the tree edge across d to its far endpoint, then
  // contract u (which removes the original edge d).
  HalfEdge across{m.d.bar()};  // from u to origin(d), label 1 at u side now
  sb.step(Slide{cur, across});
  sb.step(Slide{cur.bar(), across});
  sb.step(Slide{into_u, across});
  sb.step(Contract{sb.graph().terminus(m.d)});
  Expansion x{sb.script(), sb.graph(), {}, {}};
  x.edge_renames[d0] = m.d.edge;
  if (cur.edge != m.e.edge) x.edge_renames[cur.edge] = m.e.edge;
  return x;
}

}  // namespace gbs
