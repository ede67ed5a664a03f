// Shared test helpers: random graph generation and valid-move enumeration.
#pragma once

#include <random>
#include <vector>

#include "gbs/format.hpp"
#include "gbs/graph.hpp"
#include "gbs/moves.hpp"

namespace gbs::testutil {

inline AffineVector rand_label(std::mt19937_64& rng, long long maxabs = 60) {
  long long m = 1 + static_cast<long long>(rng() % maxabs);
  return factorize(rng() % 2 ? m : -m);
}

// Connected random graph with nv vertices and ne >= nv-1 edges.
inline GbsGraph rand_graph(std::mt19937_64& rng, int nv, int ne, long long maxabs = 60) {
  GbsGraph g;
  for (int i = 0; i < nv; ++i) g.vertices.insert("v" + std::to_string(i));
  for (int i = 0; i < ne; ++i) {
    GbsGraph::Edge e;
    if (i < nv - 1) {
      e.tail = "v" + std::to_string(i);
      e.head = "v" + std::to_string(i + 1);
    } else {
      e.tail = "v" + std::to_string(rng() % nv);
      e.head = "v" + std::to_string(rng() % nv);
    }
    e.tail_label = rand_label(rng, maxabs);
    e.head_label = rand_label(rng, maxabs);
    g.edges["e" + std::to_string(i)] = e;
  }
  return g;
}

// Every valid move of the listed kinds on g.  Expansion k values are drawn
// from labels already present; connection k ranges over 0..3.
struct MoveKinds {
  bool signs = true, expand = true, contract = true, slide = true;
  bool induct = true, swap = true, connect = true;
};

inline std::vector<Move> enumerate_moves(const GbsGraph& g, const MoveKinds& kinds = {}) {
  std::vector<Move> out;
  auto consider = [&](const Move& m) {
    if (check(g, m).empty()) out.push_back(m);
  };
  if (kinds.signs) {
    for (auto& v : g.vertices) consider(VertexSign{v});
    for (auto& [id, e] : g.edges) consider(EdgeSign{id});
  }
  if (kinds.expand) {
    for (auto& v : g.vertices)
      for (Int k : {Int(2), Int(-3), Int(6)})
        consider(Expand{v, k, g.fresh_vertex(), g.fresh_edge()});
  }
  if (kinds.contract)
    for (auto& v : g.vertices) consider(Contract{v});
  auto hs = g.half_edges();
  if (kinds.slide)
    for (auto& a : hs)
      for (auto& b : hs)
        if (a.edge != b.edge) consider(Slide{a, b});
  if (kinds.induct)
    for (auto& h : hs)
      if (check(g, Induct{h, 2, 1}).empty())
        for (Int ell : {Int(-1), Int(2), Int(vector_to_int(g.label(h)))})
          for (long long k : {1, 2}) consider(Induct{h, ell, k});
  if (kinds.swap)
    for (auto& a : hs)
      for (auto& b : hs)
        if (a.edge != b.edge) consider(Swap{a, b});
  if (kinds.connect)
    for (auto& a : hs)
      for (auto& b : hs)
        if (a.edge != b.edge)
          for (long long k : {0, 1, 2, 3}) consider(Connect{a, b, k});
  return out;
}

// Apply `steps` random valid moves of the given kinds; returns the script used.
inline MoveScript fuzz_moves(std::mt19937_64& rng, GbsGraph& g, int steps, const MoveKinds& kinds = {}) {
  MoveScript used;
  for (int i = 0; i < steps; ++i) {
    auto ms = enumerate_moves(g, kinds);
    if (ms.empty()) break;
    Move m = ms[rng() % ms.size()];
    g = gbs::apply(g, m);
    used.push_back(m);
  }
  return used;
}

}  // namespace gbs::testutil
