// Redundant vertices and their removal: loop-support closure, collapsing
// data/constants, the projection move (direct rewrite and as a move script),
// the totally-reduced property and computation, and a bounded conjugacy
// search over the affine representation.
#pragma once

#include <deque>
#include <optional>
#include <set>

#include "gbs/derived.hpp"
#include "gbs/lattice.hpp"

namespace gbs {

// e_1..e_n are loop half-edges at `vertex`, oriented so label(bar) is the
// base a_j; `exit` runs from (vertex, c) to (u, d) with u != vertex.
struct CollapsingData {
  std::string vertex;
  std::vector<HalfEdge> loops;
  HalfEdge exit;
};

// Least prime set S such that any loop at v based inside S adds its far
// support, plus the loops that contributed, in first-use order.
inline std::pair<std::set<long long>, std::vector<HalfEdge>> loop_support_closure(
    const GbsGraph& g, const std::string& v) {
  std::set<long long> S;
  std::vector<HalfEdge> order;
  std::set<std::string> used;
  bool grew = true;
  while (grew) {
    grew = false;
    for (auto& [id, e] : g.edges) {
      if (!(e.tail == v && e.head == v) || used.count(id)) continue;
      for (bool rev : {false, true}) {
        HalfEdge h{id, rev};
        AffineVector a = g.label(h.bar()), b = g.label(h);
        bool inS = true;
        for (long long p : a.support()) inS = inS && S.count(p);
        bool adds = false;
        for (long long p : b.support()) adds = adds || !S.count(p);
        if (inS && adds) {
          for (long long p : b.support()) S.insert(p);
          order.push_back(h);
          used.insert(id);
          grew = true;
          break;
        }
      }
    }
  }
  return {S, order};
}

inline std::optional<CollapsingData> is_redundant(const GbsGraph& g, const std::string& v) {
  auto [S, order] = loop_support_closure(g, v);
  for (auto& [id, e] : g.edges) {
    if (e.tail == v && e.head == v) continue;
    for (bool rev : {false, true}) {
      HalfEdge h{id, rev};
      if (g.origin(h) != v || g.terminus(h) == v) continue;
      bool ok = true;
      std::set<long long> csupp = g.label(h.bar()).support();
      for (long long p : csupp) ok = ok && S.count(p);
      if (!ok) continue;
      // Keep only the closure prefix needed to cover the exit support.
      std::vector<HalfEdge> loops;
      std::set<long long> got;
      for (const HalfEdge& l : order) {
        bool need = false;
        for (long long p : csupp) need = need || !got.count(p);
        if (!need) break;
        loops.push_back(l);
        for (long long p : g.label(l).support()) got.insert(p);
      }
      return CollapsingData{v, loops, h};
    }
  }
  return std::nullopt;
}

// K = largest exponent appearing in any half-edge label of g.
inline long long collapse_K(const GbsGraph& g) {
  long long K = 0;
  for (auto& [id, e] : g.edges)
    for (const AffineVector* a : {&e.tail_label, &e.head_label})
      for (auto& [p, x] : a->exps) K = std::max(K, x);
  return K;
}

inline std::vector<long long> default_constants(const GbsGraph& g, const CollapsingData& data) {
  return std::vector<long long>(data.loops.size(), collapse_K(g) + 1);
}

struct WSequence {
  std::vector<AffineVector> ws;  // w_1..w_n
  AffineVector w;                // k_n w_n - c
};

namespace detail {
inline void check_data(const GbsGraph& g, const CollapsingData& data,
                       const std::vector<long long>& k) {
  if (k.size() != data.loops.size())
    throw std::runtime_error("collapsing constants arity mismatch");
  long long K = collapse_K(g);
  for (long long kj : k)
    if (kj <= K) throw std::runtime_error("collapsing constant not > K");
  std::set<std::string> seen;
  std::set<long long> S;
  for (size_t j = 0; j < data.loops.size(); ++j) {
    const HalfEdge& h = data.loops[j];
    if (!g.is_loop(h.edge) || g.edge(h.edge).tail != data.vertex)
      throw std::runtime_error("collapsing edge " + h.edge + " is not a loop at the vertex");
    if (!seen.insert(h.edge).second) throw std::runtime_error("repeated collapsing edge");
    for (long long p : g.label(h.bar()).support())
      if (!S.count(p)) throw std::runtime_error("collapsing base escapes prior supports");
    for (long long p : g.label(h).support()) S.insert(p);
  }
  if (g.origin(data.exit) != data.vertex || g.terminus(data.exit) == data.vertex)
    throw std::runtime_error("exit edge does not leave the vertex");
  if (seen.count(data.exit.edge)) throw std::runtime_error("exit edge repeats a loop");
  for (long long p : g.label(data.exit.bar()).support())
    if (!S.count(p)) throw std::runtime_error("exit base escapes the loop supports");
}
}  // namespace detail

inline WSequence w_sequence(const GbsGraph& g, const CollapsingData& data,
                            const std::vector<long long>& k) {
  detail::check_data(g, data, k);
  WSequence out;
  std::set<long long> bs;  // union of supp(b_i) so far
  std::vector<AffineVector> diffs;
  for (size_t j = 0; j < data.loops.size(); ++j) {
    AffineVector a = g.label(data.loops[j].bar());
    AffineVector b = g.label(data.loops[j]);
    AffineVector wj = b - a;
    if (j > 0) wj += k[j - 1] * out.ws[j - 1];
    for (long long p : b.support()) bs.insert(p);
    if (!wj.nonneg()) throw std::runtime_error("w_j not nonnegative");
    for (long long p : bs)
      if (wj.exp(p) <= 0) throw std::runtime_error("supp(w_j) misses a b-support prime");
    diffs.push_back(b - a);
    out.ws.push_back(wj);
    // span(w_1..w_j) must match span(b_1-a_1..b_j-a_j)
    std::set<long long> I = g.set_of_primes();
    if (!equal(LatticeSubgroup::span(std::vector<AffineVector>(out.ws.begin(), out.ws.end()), I),
               LatticeSubgroup::span(diffs, I)))
      throw std::runtime_error("w-sequence span mismatch");
  }
  AffineVector c = g.label(data.exit.bar());
  out.w = -1 * c;
  if (!data.loops.empty()) out.w += k.back() * out.ws.back();
  if (!out.w.nonneg()) throw std::runtime_error("k_n w_n does not dominate c");
  return out;
}

// Direct projection rewrite: removes the vertex and the exit edge, rebases
// the loops at the far endpoint, and translates every other endpoint by d+w.
inline GbsGraph project(const GbsGraph& g, const CollapsingData& data,
                        const std::vector<long long>& k) {
  WSequence ws = w_sequence(g, data, k);
  const std::string v = data.vertex;
  const std::string u = g.terminus(data.exit);
  AffineVector d = g.label(data.exit);
  GbsGraph h = g;
  h.edges.erase(data.exit.edge);
  h.vertices.erase(v);
  // Edge ids follow the swap chain: the last data loop ends up based at d
  // carrying w_n, and the id of e_j carries (d+w+a_{j+1}, ... + w_j).
  size_t n = data.loops.size();
  for (size_t j = 0; j < n; ++j) {
    AffineVector base = j + 1 < n ? d + ws.w + g.label(data.loops[j + 1].bar()) : d;
    AffineVector span = j + 1 < n ? ws.ws[j] : ws.ws[n - 1];
    h.edges[data.loops[j].edge] = {u, u, base, base + span};
  }
  for (auto& [id, e] : h.edges) {
    bool isloop = false;
    for (auto& hh : data.loops) isloop = isloop || hh.edge == id;
    if (isloop) continue;
    if (e.tail == v) {
      e.tail = u;
      e.tail_label += d + ws.w;
    }
    if (e.head == v) {
      e.head = u;
      e.head_label += d + ws.w;
    }
  }
  return h;
}

namespace detail {
// Stage shared by projection and controlling-edge synthesis: clear the base
// sign, then slide-and-swap each later loop into the chain.  Returns the
// token of the final loop (base 0, translation w_n).
inline HalfEdge collapse_chain(ScriptBuilder& sb, const std::vector<HalfEdge>& loops,
                               const std::vector<long long>& k) {
  HalfEdge act = loops[0];
  if (sb.graph().label(act.bar()).sign) sb.step(EdgeSign{act.edge});
  for (size_t j = 1; j < loops.size(); ++j) {
    for (long long i = 0; i < k[j - 1]; ++i) sb.step(Slide{loops[j], act});
    sb.step(Swap{act, loops[j]});
    act = loops[j];
  }
  return act;
}
}  // namespace detail

// The projection as a script of sign-changes, slides, swaps and inductions
// followed by a contraction; replay equals project() on the same ids.
inline MoveScript project_as_moves(const GbsGraph& g, const CollapsingData& data,
                                   const std::vector<long long>& k) {
  WSequence ws = w_sequence(g, data, k);
  ScriptBuilder sb(g);
  const std::string v = data.vertex;
  if (!data.loops.empty()) {
    HalfEdge act = detail::collapse_chain(sb, data.loops, k);
    if (!ws.w.is_zero()) {
      // The induction translates every other endpoint at v by w; in
      // particular the exit base becomes c + w = k_n w_n.
      AffineVector wn = sb.graph().label(act);
      long long kk = 0;
      for (auto& [p, e] : ws.w.exps)
        if (e > 0) kk = std::max(kk, (e + wn.exp(p) - 1) / wn.exp(p));
      sb.step(Induct{act, vector_to_int(ws.w), kk});
    }
    for (long long i = 0; i < k.back(); ++i) sb.step(Slide{data.exit.bar(), act.bar()});
  } else if (sb.graph().label(data.exit.bar()).sign) {
    sb.step(EdgeSign{data.exit.edge});
  }
  for (const HalfEdge& h : sb.graph().half_edges_into(v))
    if (h.edge != data.exit.edge) sb.step(Slide{h, data.exit});
  sb.step(Contract{v});
  return sb.script();
}

struct ReducedCheck {
  bool ok = true;
  std::string reason;
};

// Condition 2 at one vertex: some loop based exactly at 0 whose far support
// covers the closure, vacuous when no loop is usable from the origin.
namespace detail {
inline bool condition2(const GbsGraph& g, const std::string& v) {
  auto [S, order] = loop_support_closure(g, v);
  bool usable = false, covered = false;
  for (auto& [id, e] : g.edges) {
    if (!(e.tail == v && e.head == v)) continue;
    for (bool rev : {false, true}) {
      HalfEdge h{id, rev};
      AffineVector a = g.label(h.bar());
      if (!a.support().empty()) continue;
      usable = true;
      if (!a.is_zero()) continue;  // base must be exactly 0
      bool cov = true;
      for (long long p : S) cov = cov && g.label(h).exp(p) > 0;
      covered = covered || cov;
    }
  }
  return !usable || covered;
}
}  // namespace detail

inline ReducedCheck is_totally_reduced(const GbsGraph& g) {
  for (auto& v : g.vertices)
    if (is_redundant(g, v)) return {false, "vertex " + v + " is redundant"};
  for (auto& v : g.vertices)
    if (!detail::condition2(g, v)) return {false, "no controlling loop at " + v};
  return {true, ""};
}

namespace detail {
// Substitute current ids into a move; `flip` marks edges whose replacement
// has the opposite stored orientation.
struct IdTracker {
  std::map<std::string, std::string> vmap, emap;
  std::map<std::string, bool> eflip;

  std::string vertex(const std::string& v) const {
    auto it = vmap.find(v);
    return it == vmap.end() ? v : it->second;
  }
  std::string edge(const std::string& e) const {
    auto it = emap.find(e);
    return it == emap.end() ? e : it->second;
  }
  HalfEdge half(const HalfEdge& h) const {
    auto it = eflip.find(h.edge);
    bool f = it != eflip.end() && it->second;
    return {edge(h.edge), h.rev != f};
  }
  Move rename(const Move& m) const {
    return std::visit(
        [&](auto mm) -> Move {
          using T = std::decay_t<decltype(mm)>;
          if constexpr (std::is_same_v<T, VertexSign>) mm.v = vertex(mm.v);
          else if constexpr (std::is_same_v<T, EdgeSign>) mm.e = edge(mm.e);
          else if constexpr (std::is_same_v<T, Expand>) mm.at = vertex(mm.at);
          else if constexpr (std::is_same_v<T, Contract>) mm.v = vertex(mm.v);
          else if constexpr (std::is_same_v<T, Slide>) {
            mm.moved = half(mm.moved);
            mm.along = half(mm.along);
          } else if constexpr (std::is_same_v<T, Induct>) mm.loop = half(mm.loop);
          else if constexpr (std::is_same_v<T, Swap>) {
            mm.e1 = half(mm.e1);
            mm.e2 = half(mm.e2);
          } else if constexpr (std::is_same_v<T, Connect>) {
            mm.d = half(mm.d);
            mm.e = half(mm.e);
          }
          return mm;
        },
        m);
  }

  // Fold one expansion's renames (fresh <- direct, ids of the replayed and
  // directly-moved graphs) into the original-id chain.  All renames of the
  // expansion are applied together: a fresh id may recycle a direct id that
  // is itself being renamed, so sequential updates would cross the chains.
  void record(const std::map<std::string, std::string>& edge_renames,
              const std::map<std::string, std::string>& vertex_renames,
              const GbsGraph& replayed, const GbsGraph& target) {
    std::map<std::string, std::pair<std::string, bool>> by_direct;
    for (auto& [fresh, direct] : edge_renames) {
      const GbsGraph::Edge& a = replayed.edge(fresh);
      const GbsGraph::Edge& b = target.edge(direct);
      // Vertex names may have been refreshed too, so compare labels; fall
      // back to names only when the labels cannot tell orientations apart.
      bool straight = a.tail_label == b.tail_label && a.head_label == b.head_label;
      bool crossed = a.tail_label == b.head_label && a.head_label == b.tail_label;
      bool flip = !straight && crossed;
      if (straight && crossed && a.tail != a.head) flip = a.tail == b.head;
      by_direct[direct] = {fresh, flip};
    }
    std::set<std::string> linked;
    for (auto& [orig, cur] : emap) {
      auto it = by_direct.find(cur);
      if (it == by_direct.end()) continue;
      linked.insert(it->first);
      bool prev = eflip.count(orig) && eflip[orig];
      cur = it->second.first;
      eflip[orig] = prev != it->second.second;
    }
    for (auto& [direct, fr] : by_direct) {
      if (linked.count(direct)) continue;
      // A direct id that is a stale chain key denotes a recycled edge the
      // original script never mentions; don't clobber the original entry.
      if (emap.count(direct)) continue;
      emap[direct] = fr.first;
      eflip[direct] = fr.second;
    }
    std::map<std::string, std::string> vby(vertex_renames.begin(), vertex_renames.end());
    std::map<std::string, std::string> v_direct;  // direct -> fresh
    for (auto& [fresh, direct] : vby) v_direct[direct] = fresh;
    std::set<std::string> vlinked;
    for (auto& [orig, cur] : vmap) {
      auto it = v_direct.find(cur);
      if (it == v_direct.end()) continue;
      vlinked.insert(it->first);
      cur = it->second;
    }
    for (auto& [direct, fresh] : v_direct) {
      if (vlinked.count(direct) || vmap.count(direct)) continue;
      vmap[direct] = fresh;
    }
  }
};
}  // namespace detail

// Replays a script, expanding every swap, induction and connection into
// elementary moves via the derived-move constructions.
struct Elaborated {
  MoveScript script;
  GbsGraph graph;
};

inline Elaborated elaborate(const GbsGraph& g, const MoveScript& s) {
  GbsGraph cur = g;
  MoveScript out;
  detail::IdTracker ids;
  for (const Move& m0 : s) {
    Move m = ids.rename(m0);
    Expansion x;
    if (std::holds_alternative<Swap>(m)) x = expand_swap(cur, std::get<Swap>(m));
    else if (std::holds_alternative<Induct>(m)) x = expand_induction(cur, std::get<Induct>(m));
    else if (std::holds_alternative<Connect>(m)) x = expand_connection(cur, std::get<Connect>(m));
    else {
      out.push_back(m);
      cur = gbs::apply(cur, m);
      continue;
    }
    GbsGraph direct = gbs::apply(cur, m);
    ids.record(x.edge_renames, x.vertex_renames, x.result, direct);
    out.insert(out.end(), x.script.begin(), x.script.end());
    cur = x.result;
  }
  return {out, cur};
}

// Removes redundant vertices by projections and synthesizes the controlling
// loops of condition 2; the returned script uses only sign-changes,
// expansions, contractions and slides.
inline std::pair<GbsGraph, MoveScript> totally_reduce(const GbsGraph& g) {
  GbsGraph cur = g;
  MoveScript out;
  auto run = [&](const MoveScript& s) {
    Elaborated el = elaborate(cur, s);
    out.insert(out.end(), el.script.begin(), el.script.end());
    cur = el.graph;
  };
  for (;;) {
    std::optional<CollapsingData> data;
    for (auto& v : cur.vertices)
      if ((data = is_redundant(cur, v))) break;
    if (!data) break;
    run(project_as_moves(cur, *data, default_constants(cur, *data)));
  }
  for (std::string v : std::vector<std::string>(cur.vertices.begin(), cur.vertices.end())) {
    if (detail::condition2(cur, v)) continue;
    auto [S, order] = loop_support_closure(cur, v);
    MoveScript s;
    if (order.empty()) {
      // Every usable loop is sign-only at both ends; clear one base.
      for (auto& [id, e] : cur.edges)
        if (e.tail == v && e.head == v && e.tail_label.support().empty() &&
            e.tail_label.sign) {
          s.push_back(EdgeSign{id});
          break;
        }
    } else {
      ScriptBuilder sb(cur);
      detail::collapse_chain(sb, order, std::vector<long long>(order.size(), collapse_K(cur) + 1));
      s = sb.script();
    }
    run(s);
  }
  ReducedCheck rc = is_totally_reduced(cur);
  if (!rc.ok) throw std::runtime_error("totally_reduce failed: " + rc.reason);
  return {cur, out};
}

// --- bounded conjugacy search ---------------------------------------------

struct PathStep {
  HalfEdge edge;
  AffineVector w;  // translation coefficient
};

struct ConjVerdict {
  enum class Kind { yes, no, unknown } kind = Kind::unknown;
  std::vector<PathStep> path;  // for yes
  bool pruned = false;
};

inline bool validate_affine_path(const GbsGraph& g, const AffinePoint& p, const AffinePoint& q,
                                 const std::vector<PathStep>& path) {
  AffinePoint cur = p;
  for (const PathStep& s : path) {
    if (!s.w.nonneg()) return false;
    if (g.origin(s.edge) != cur.vertex) return false;
    if (!(g.label(s.edge.bar()) + s.w == cur.coord)) return false;
    cur = {g.terminus(s.edge), g.label(s.edge) + s.w};
  }
  return cur.vertex == q.vertex && cur.coord == q.coord;
}

inline long long default_conj_cap(const GbsGraph& g, const AffinePoint& p, const AffinePoint& q) {
  long long m = 0;
  for (auto& [id, e] : g.edges)
    for (const AffineVector* a : {&e.tail_label, &e.head_label})
      for (auto& [pr, x] : a->exps) m = std::max(m, x);
  for (const AffinePoint* pt : {&p, &q})
    for (auto& [pr, x] : pt->coord.exps) m = std::max(m, x);
  return m + 4;
}

inline ConjVerdict conjugate(const GbsGraph& g, const AffinePoint& p, const AffinePoint& q,
                             long long cap = -1, size_t budget = 1000000) {
  if (cap < 0) cap = default_conj_cap(g, p, q);
  using State = std::pair<std::string, AffineVector>;
  State start{p.vertex, p.coord}, goal{q.vertex, q.coord};
  std::map<State, std::pair<State, PathStep>> parent;
  std::deque<State> frontier{start};
  std::set<State> seen{start};
  bool pruned = false;
  auto hs = g.half_edges();
  while (!frontier.empty()) {
    State cur = frontier.front();
    frontier.pop_front();
    if (cur == goal) {
      ConjVerdict out{ConjVerdict::Kind::yes, {}, pruned};
      for (State s = cur; !(s == start); s = parent.at(s).first)
        out.path.insert(out.path.begin(), parent.at(s).second);
      return out;
    }
    for (const HalfEdge& h : hs) {
      if (g.origin(h) != cur.first) continue;
      AffineVector w = cur.second - g.label(h.bar());
      if (!w.nonneg()) continue;
      AffineVector next = g.label(h) + w;
      bool over = false;
      for (auto& [pr, x] : next.exps) over = over || x > cap;
      if (over) {
        pruned = true;
        continue;
      }
      State st{g.terminus(h), next};
      if (seen.count(st)) continue;
      if (seen.size() >= budget) {
        pruned = true;
        continue;
      }
      seen.insert(st);
      parent[st] = {cur, PathStep{h, w}};
      frontier.push_back(st);
    }
  }
  return {pruned ? ConjVerdict::Kind::unknown : ConjVerdict::Kind::no, {}, pruned};
}

}  // namespace gbs
