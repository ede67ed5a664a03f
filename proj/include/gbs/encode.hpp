// The two reductions that trade graph shape for fresh primes:
//   * many-vertex -> one-vertex: each half-edge label picks up a prime tagging
//     the vertex it used to sit at, and all vertices merge into one;
//   * signed -> positive: the sign bit of each label becomes the parity of the
//     exponent of a fresh prime q, an extra inert loop f (labels r, r q^2) lets
//     slides shift q-exponents by 2, and every old label gains a factor r^2 so
//     that no move can ever touch f.
// Both come with script translations in each direction.
#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gbs/graph.hpp"
#include "gbs/moves.hpp"

namespace gbs {

// Vertex -> fresh prime.  Injective, disjoint from the primes of the graphs
// being encoded.
struct PrimeAssignment {
  std::map<std::string, long long> prime;

  std::set<long long> image() const {
    std::set<long long> s;
    for (auto& [v, p] : prime) s.insert(p);
    return s;
  }
};

// Smallest primes above everything in `avoid`, assigned to the vertices of g
// in sorted order.  Deterministic, so both sides of a comparison can share an
// assignment by passing the union of their prime sets.
inline PrimeAssignment assign_vertex_primes(const GbsGraph& g, std::set<long long> avoid = {}) {
  for (long long p : g.set_of_primes()) avoid.insert(p);
  long long cur = avoid.empty() ? 1 : *avoid.rbegin();
  PrimeAssignment pa;
  for (const std::string& v : g.vertices) {
    cur = next_prime(cur);
    pa.prime[v] = cur;
  }
  return pa;
}

// The next `count` primes above both graphs' primes (used for the q, r pair of
// the positivity encoding).
inline std::vector<long long> fresh_primes(const GbsGraph& g, int count,
                                           std::set<long long> avoid = {}) {
  for (long long p : g.set_of_primes()) avoid.insert(p);
  long long cur = avoid.empty() ? 1 : *avoid.rbegin();
  std::vector<long long> out;
  for (int i = 0; i < count; ++i) {
    cur = next_prime(cur);
    out.push_back(cur);
  }
  return out;
}

// Collapse g to a single vertex, multiplying each half-edge label by the prime
// of its terminal vertex.  Output labels all carry exactly one fresh prime, so
// the result is induction-free.
inline GbsGraph encode_one_vertex(const GbsGraph& g, const PrimeAssignment& pa,
                                  const std::string& vertex_name = "*") {
  std::set<long long> used = g.set_of_primes();
  std::set<long long> seen;
  for (const std::string& v : g.vertices) {
    auto it = pa.prime.find(v);
    if (it == pa.prime.end())
      throw std::invalid_argument("encode_one_vertex: no prime assigned to vertex " + v);
    if (!is_prime(it->second))
      throw std::invalid_argument("encode_one_vertex: assigned value " +
                                  std::to_string(it->second) + " is not prime");
    if (used.count(it->second))
      throw std::invalid_argument("encode_one_vertex: prime " + std::to_string(it->second) +
                                  " already occurs in the graph");
    if (!seen.insert(it->second).second)
      throw std::invalid_argument("encode_one_vertex: prime " + std::to_string(it->second) +
                                  " assigned twice");
  }
  GbsGraph h;
  h.vertices.insert(vertex_name);
  for (auto& [id, e] : g.edges) {
    GbsGraph::Edge ne;
    ne.tail = vertex_name;
    ne.head = vertex_name;
    ne.tail_label = e.tail_label;
    ne.tail_label.set_exp(pa.prime.at(e.tail), ne.tail_label.exp(pa.prime.at(e.tail)) + 1);
    ne.head_label = e.head_label;
    ne.head_label.set_exp(pa.prime.at(e.head), ne.head_label.exp(pa.prime.at(e.head)) + 1);
    h.edges[id] = ne;
  }
  return h;
}

// Outcome of a script translation.  On failure `at` is the index of the first
// step that could not be carried across and `script` holds the translation of
// the steps before it.
struct ScriptTranslation {
  bool ok = true;
  MoveScript script;
  std::size_t at = 0;
  std::string reason;
};

namespace detail {

inline bool translatable_kind(const Move& m) {
  return std::holds_alternative<Slide>(m) || std::holds_alternative<Swap>(m) ||
         std::holds_alternative<Connect>(m) || std::holds_alternative<EdgeSign>(m);
}

inline ScriptTranslation translate_fail(ScriptTranslation t, std::size_t i, std::string reason) {
  t.ok = false;
  t.at = i;
  t.reason = std::move(reason);
  return t;
}

}  // namespace detail

// Carry a slide/swap/connection script on g down to encode_one_vertex(g, pa).
// The moves map by name; both sides are replayed and the first invalid step is
// reported.
inline ScriptTranslation translate_script_down(const GbsGraph& g, const PrimeAssignment& pa,
                                               const MoveScript& s) {
  GbsGraph up = g;
  GbsGraph down = encode_one_vertex(g, pa);
  ScriptTranslation t;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!detail::translatable_kind(s[i]))
      return detail::translate_fail(t, i, "only slides, swaps, connections and edge "
                                          "sign-changes translate across the one-vertex encoding");
    std::string r = check(up, s[i]);
    if (!r.empty()) return detail::translate_fail(t, i, "invalid upstairs: " + r);
    r = check(down, s[i]);
    if (!r.empty()) return detail::translate_fail(t, i, "invalid downstairs: " + r);
    up = gbs::apply(up, s[i]);
    down = gbs::apply(down, s[i]);
    t.script.push_back(s[i]);
  }
  return t;
}

// Inverse direction: a script on the one-vertex encoding lifts to g move for
// move.  The vertex primes police the bookkeeping: a downstairs move that
// mixes edges whose hidden endpoints disagree fails its own divisibility
// check, and anything that survives both replays lifts verbatim.
inline ScriptTranslation translate_script_up(const GbsGraph& g, const PrimeAssignment& pa,
                                             const MoveScript& s) {
  GbsGraph up = g;
  GbsGraph down = encode_one_vertex(g, pa);
  ScriptTranslation t;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!detail::translatable_kind(s[i]))
      return detail::translate_fail(t, i, "only slides, swaps, connections and edge "
                                          "sign-changes translate across the one-vertex encoding");
    std::string r = check(down, s[i]);
    if (!r.empty()) return detail::translate_fail(t, i, "invalid downstairs: " + r);
    r = check(up, s[i]);
    if (!r.empty()) return detail::translate_fail(t, i, "no upstairs counterpart: " + r);
    up = gbs::apply(up, s[i]);
    down = gbs::apply(down, s[i]);
    t.script.push_back(s[i]);
  }
  return t;
}

// Rewrite a one-vertex induction-free graph with positive labels only: each
// label |phi| r^2 q^{2 k_e + sign}, plus the inert loop f with labels r, r q^2.
// k defaults to 0 per edge and applies to both half-edge labels.
inline GbsGraph encode_positive(const GbsGraph& g, long long q, long long r,
                                const std::map<std::string, long long>& k = {},
                                const std::string& f_id = "f") {
  if (g.vertices.size() != 1)
    throw std::invalid_argument("encode_positive: graph must have one vertex");
  std::set<long long> used = g.set_of_primes();
  if (!is_prime(q) || !is_prime(r) || q == r || used.count(q) || used.count(r))
    throw std::invalid_argument("encode_positive: q, r must be distinct fresh primes");
  if (g.has_edge(f_id))
    throw std::invalid_argument("encode_positive: edge id " + f_id + " already in use");
  for (auto& [id, e] : g.edges)
    if (e.tail_label.is_sign_only() || e.head_label.is_sign_only())
      throw std::invalid_argument("encode_positive: graph is not induction-free (edge " + id + ")");
  for (auto& [id, ke] : k)
    if (ke < 0) throw std::invalid_argument("encode_positive: k must be nonnegative");

  const std::string v = *g.vertices.begin();
  auto rewrite = [&](const AffineVector& a, long long ke) {
    AffineVector b = a;
    b.set_exp(r, b.exp(r) + 2);
    b.set_exp(q, b.exp(q) + 2 * ke + b.sign);
    b.sign = 0;
    return b;
  };
  GbsGraph h;
  h.vertices.insert(v);
  for (auto& [id, e] : g.edges) {
    auto it = k.find(id);
    long long ke = it == k.end() ? 0 : it->second;
    h.edges[id] = {v, v, rewrite(e.tail_label, ke), rewrite(e.head_label, ke)};
  }
  AffineVector fr = factorize(r), frq2 = factorize(r);
  frq2.set_exp(q, 2);
  h.edges[f_id] = {v, v, fr, frq2};
  return h;
}

// Undo encode_positive: drop f, strip r^2, and turn the q-exponent parity back
// into a sign bit.  Throws if the graph is not in the image.
inline GbsGraph decode_positive(const GbsGraph& g, long long q, long long r,
                                const std::string& f_id = "f") {
  if (!g.has_edge(f_id)) throw std::invalid_argument("decode_positive: no edge " + f_id);
  const std::string v = *g.vertices.begin();
  auto restore = [&](AffineVector a) {
    if (a.sign != 0 || a.exp(r) != 2 || a.exp(q) < 0)
      throw std::invalid_argument("decode_positive: label not of the form |phi| r^2 q^j");
    a.sign = static_cast<int>(a.exp(q) & 1);
    a.set_exp(q, 0);
    a.set_exp(r, 0);
    return a;
  };
  GbsGraph h;
  h.vertices.insert(v);
  for (auto& [id, e] : g.edges) {
    if (id == f_id) continue;
    h.edges[id] = {v, v, restore(e.tail_label), restore(e.head_label)};
  }
  return h;
}

// Reduce every q-exponent outside f to its parity (the minimal representative
// of its k_e class).  Two downstairs graphs are "the same up to k choice" iff
// their canonical forms are equal.
inline GbsGraph canonicalize_q(const GbsGraph& g, long long q, const std::string& f_id = "f") {
  GbsGraph h = g;
  for (auto& [id, e] : h.edges) {
    if (id == f_id) continue;
    e.tail_label.set_exp(q, e.tail_label.exp(q) & 1);
    e.head_label.set_exp(q, e.head_label.exp(q) & 1);
  }
  return h;
}

namespace detail {

// Emits slides of h along f/f.bar() until label(h) has q-exponent `target`
// (same parity as the current exponent), updating `down` as it goes.
inline void shift_q_exp(GbsGraph& down, MoveScript& out, const HalfEdge& h, long long q,
                        long long target, const std::string& f_id) {
  long long cur = down.label(h).exp(q);
  while (cur < target) {
    Move m = Slide{h, {f_id, false}};
    require(down, std::get<Slide>(m));
    down = gbs::apply(down, m);
    out.push_back(m);
    cur += 2;
  }
  while (cur > target) {
    Move m = Slide{h, {f_id, true}};
    require(down, std::get<Slide>(m));
    down = gbs::apply(down, m);
    out.push_back(m);
    cur -= 2;
  }
}

// Minimal q-exponent with the given sign parity.
inline long long min_parity(int sign) { return sign & 1; }

}  // namespace detail

// Carry a slide/swap/connection script on a one-vertex induction-free graph
// down to its positive encoding.  Each move maps by name, preceded by slides
// along f that line the q-exponents up with what the move needs.  Edge
// sign-changes are rejected: the q-exponent parity of every label is invariant
// under all moves (f itself can never be altered, since every other label
// carries r^2), so a sign flip has no counterpart among the positive graphs.
inline ScriptTranslation translate_script_positive_down(const GbsGraph& g, long long q,
                                                        long long r, const MoveScript& s,
                                                        const std::string& f_id = "f") {
  GbsGraph up = g;
  GbsGraph down = encode_positive(g, q, r, {}, f_id);
  ScriptTranslation t;
  auto touches_f = [&](const HalfEdge& h) { return h.edge == f_id; };
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::string rr = check(up, s[i]);
    if (!rr.empty()) return detail::translate_fail(t, i, "invalid upstairs: " + rr);

    if (auto* sl = std::get_if<Slide>(&s[i])) {
      if (touches_f(sl->moved) || touches_f(sl->along))
        return detail::translate_fail(t, i, "edge id " + f_id + " is reserved downstairs");
      // q-divisibility: bump the moved label until it clears the along label.
      long long jb = down.label(sl->along.bar()).exp(q);
      long long jm = down.label(sl->moved).exp(q);
      long long target = jm >= jb ? jm : jb + ((jm ^ jb) & 1);
      detail::shift_q_exp(down, t.script, sl->moved, q, target, f_id);
    } else if (auto* sw = std::get_if<Swap>(&s[i])) {
      if (touches_f(sw->e1) || touches_f(sw->e2))
        return detail::translate_fail(t, i, "edge id " + f_id + " is reserved downstairs");
      int sb1 = up.label(sw->e1.bar()).sign, st1 = up.label(sw->e1).sign;
      int sb2 = up.label(sw->e2.bar()).sign, st2 = up.label(sw->e2).sign;
      long long jb1, jb2, w1q, w2q;
      if (sb1 == sb2) {
        // Bases can share a q-exponent; translations get their minimal parity.
        jb1 = jb2 = detail::min_parity(sb1);
        w1q = detail::min_parity(st1 ^ sb1);
        w2q = detail::min_parity(st2 ^ sb2);
      } else {
        // Base difference is odd in q, so q must occur in both translations.
        jb1 = detail::min_parity(sb1);
        jb2 = jb1 + 1;
        w1q = (st1 ^ sb1) ? 1 : 2;
        w2q = (st2 ^ sb2) ? 1 : 2;
      }
      detail::shift_q_exp(down, t.script, sw->e1.bar(), q, jb1, f_id);
      detail::shift_q_exp(down, t.script, sw->e1, q, jb1 + w1q, f_id);
      detail::shift_q_exp(down, t.script, sw->e2.bar(), q, jb2, f_id);
      detail::shift_q_exp(down, t.script, sw->e2, q, jb2 + w2q, f_id);
    } else if (auto* cn = std::get_if<Connect>(&s[i])) {
      if (touches_f(cn->d) || touches_f(cn->e))
        return detail::translate_fail(t, i, "edge id " + f_id + " is reserved downstairs");
      int sn = up.label(cn->e.bar()).sign;
      int sl1 = up.label(cn->d).sign ^ sn;
      int slv = up.label(cn->e).sign ^ sn;
      long long lq, l1q;
      if (sl1 == 0) {
        l1q = 0;
        lq = detail::min_parity(slv);
      } else if (cn->k >= 1) {
        l1q = 1;
        lq = slv ? 1 : 2;
      } else {
        // k = 0 with psi(d) = -psi(e.bar()): the sign cancellation t + t = 0
        // has no analogue for q, whose exponents only accumulate.
        return detail::translate_fail(t, i, "connection relies on sign cancellation and "
                                            "has no positive counterpart");
      }
      long long jn = detail::min_parity(sn);
      detail::shift_q_exp(down, t.script, cn->e.bar(), q, jn, f_id);
      detail::shift_q_exp(down, t.script, cn->e, q, jn + lq, f_id);
      detail::shift_q_exp(down, t.script, cn->d, q, jn + l1q, f_id);
    } else {
      return detail::translate_fail(t, i, "only slides, swaps and connections translate "
                                          "across the positivity encoding");
    }

    std::string rd = check(down, s[i]);
    if (!rd.empty()) return detail::translate_fail(t, i, "invalid downstairs: " + rd);
    up = gbs::apply(up, s[i]);
    down = gbs::apply(down, s[i]);
    t.script.push_back(s[i]);
  }
  return t;
}

// Inverse direction: slides along f disappear (they only re-choose a k_e),
// every other structural use of f is impossible downstairs and reported, and
// the remaining moves lift by name.
inline ScriptTranslation translate_script_positive_up(const GbsGraph& g, long long q,
                                                      long long r, const MoveScript& s,
                                                      const std::string& f_id = "f") {
  GbsGraph up = g;
  GbsGraph down = encode_positive(g, q, r, {}, f_id);
  ScriptTranslation t;
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::string rd = check(down, s[i]);
    if (!rd.empty()) return detail::translate_fail(t, i, "invalid downstairs: " + rd);
    bool erase = false;
    if (auto* sl = std::get_if<Slide>(&s[i])) {
      if (sl->along.edge == f_id)
        erase = true;  // k_e re-choice, no upstairs content
      else if (sl->moved.edge == f_id)
        return detail::translate_fail(t, i, "move alters the reserved edge " + f_id);
    } else if (auto* sw = std::get_if<Swap>(&s[i])) {
      if (sw->e1.edge == f_id || sw->e2.edge == f_id)
        return detail::translate_fail(t, i, "move alters the reserved edge " + f_id);
    } else if (auto* cn = std::get_if<Connect>(&s[i])) {
      if (cn->d.edge == f_id || cn->e.edge == f_id)
        return detail::translate_fail(t, i, "move alters the reserved edge " + f_id);
    } else {
      return detail::translate_fail(t, i, "only slides, swaps and connections translate "
                                          "across the positivity encoding");
    }
    if (!erase) {
      std::string ru = check(up, s[i]);
      if (!ru.empty()) return detail::translate_fail(t, i, "no upstairs counterpart: " + ru);
      up = gbs::apply(up, s[i]);
      t.script.push_back(s[i]);
    }
    down = gbs::apply(down, s[i]);
  }
  return t;
}

}  // namespace gbs
