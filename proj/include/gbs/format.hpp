// Text formats: the `gbs 1` graph format and the move-script format.
//
//   gbs 1
//   vertex <name>
//   edge <name> <vA>:<mA> <vB>:<mB>      # mA labels the half-edge into vA
//
// Scripts are one move per line:
//   vsign v | esign e | expand v k AS v' e' | contract v0
//   slide d.rev along e.fwd | induct e.fwd ell k | swap e1.fwd e2.fwd
//   connect d.fwd e.fwd k
// '#' starts a comment in both formats.
#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "gbs/graph.hpp"
#include "gbs/moves.hpp"

namespace gbs {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {
inline std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream is(line);
  std::string t;
  while (is >> t) {
    if (t[0] == '#') break;
    toks.push_back(t);
  }
  return toks;
}

inline Int parse_int(const std::string& s, int lineno) {
  try {
    size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) throw std::invalid_argument("empty");
    for (size_t j = i; j < s.size(); ++j)
      if (!isdigit(static_cast<unsigned char>(s[j]))) throw std::invalid_argument("digit");
    return Int(s);
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(lineno) + ": bad integer '" + s + "'");
  }
}

inline HalfEdge parse_half_edge(const std::string& s, int lineno) {
  size_t dot = s.rfind('.');
  if (dot == std::string::npos)
    throw ParseError("line " + std::to_string(lineno) + ": half-edge must be <edge>.fwd or <edge>.rev");
  std::string dir = s.substr(dot + 1);
  if (dir != "fwd" && dir != "rev")
    throw ParseError("line " + std::to_string(lineno) + ": bad half-edge direction '" + dir + "'");
  return {s.substr(0, dot), dir == "rev"};
}
}  // namespace detail

inline GbsGraph parse_graph(const std::string& text) {
  GbsGraph g;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(is, line)) {
    ++lineno;
    auto toks = detail::tokenize(line);
    if (toks.empty()) continue;
    if (!header) {
      if (toks.size() != 2 || toks[0] != "gbs" || toks[1] != "1")
        throw ParseError("line " + std::to_string(lineno) + ": expected header 'gbs 1'");
      header = true;
      continue;
    }
    if (toks[0] == "vertex") {
      if (toks.size() != 2) throw ParseError("line " + std::to_string(lineno) + ": vertex takes one name");
      if (!g.vertices.insert(toks[1]).second)
        throw ParseError("line " + std::to_string(lineno) + ": duplicate vertex " + toks[1]);
    } else if (toks[0] == "edge") {
      if (toks.size() != 4) throw ParseError("line " + std::to_string(lineno) + ": edge takes name and two endpoints");
      if (g.edges.count(toks[1]))
        throw ParseError("line " + std::to_string(lineno) + ": duplicate edge " + toks[1]);
      GbsGraph::Edge e;
      auto endpoint = [&](const std::string& tok, std::string& v, AffineVector& lab) {
        size_t c = tok.rfind(':');
        if (c == std::string::npos)
          throw ParseError("line " + std::to_string(lineno) + ": endpoint must be <vertex>:<label>");
        v = tok.substr(0, c);
        Int m = detail::parse_int(tok.substr(c + 1), lineno);
        if (m == 0) throw ParseError("line " + std::to_string(lineno) + ": labels must be nonzero");
        if (!g.vertices.count(v))
          throw ParseError("line " + std::to_string(lineno) + ": unknown vertex " + v);
        lab = factorize(m);
      };
      endpoint(toks[2], e.tail, e.tail_label);
      endpoint(toks[3], e.head, e.head_label);
      g.edges[toks[1]] = e;
    } else {
      throw ParseError("line " + std::to_string(lineno) + ": unknown directive " + toks[0]);
    }
  }
  if (!header) throw ParseError("missing 'gbs 1' header");
  std::string v = g.validate();
  if (!v.empty()) throw ParseError(v);
  return g;
}

inline std::string serialize_graph(const GbsGraph& g) {
  GbsGraph c = canonical(g);
  std::ostringstream os;
  os << "gbs 1\n";
  for (auto& v : c.vertices) os << "vertex " << v << "\n";
  for (auto& [id, e] : c.edges)
    os << "edge " << id << " " << e.tail << ":" << vector_to_int(e.tail_label) << " " << e.head
       << ":" << vector_to_int(e.head_label) << "\n";
  return os.str();
}

inline MoveScript parse_script(const std::string& text) {
  MoveScript s;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto toks = detail::tokenize(line);
    if (toks.empty()) continue;
    auto want = [&](size_t n, const char* usage) {
      if (toks.size() != n)
        throw ParseError("line " + std::to_string(lineno) + ": usage: " + usage);
    };
    if (toks[0] == "vsign") {
      want(2, "vsign v");
      s.push_back(VertexSign{toks[1]});
    } else if (toks[0] == "esign") {
      want(2, "esign e");
      s.push_back(EdgeSign{toks[1]});
    } else if (toks[0] == "expand") {
      want(6, "expand v k AS v' e'");
      if (toks[3] != "AS") throw ParseError("line " + std::to_string(lineno) + ": usage: expand v k AS v' e'");
      s.push_back(Expand{toks[1], detail::parse_int(toks[2], lineno), toks[4], toks[5]});
    } else if (toks[0] == "contract") {
      want(2, "contract v0");
      s.push_back(Contract{toks[1]});
    } else if (toks[0] == "slide") {
      want(4, "slide d.fwd along e.fwd");
      if (toks[2] != "along")
        throw ParseError("line " + std::to_string(lineno) + ": usage: slide d.fwd along e.fwd");
      s.push_back(Slide{detail::parse_half_edge(toks[1], lineno), detail::parse_half_edge(toks[3], lineno)});
    } else if (toks[0] == "induct") {
      want(4, "induct e.fwd ell k");
      s.push_back(Induct{detail::parse_half_edge(toks[1], lineno), detail::parse_int(toks[2], lineno),
                         detail::parse_int(toks[3], lineno).convert_to<long long>()});
    } else if (toks[0] == "swap") {
      want(3, "swap e1.fwd e2.fwd");
      s.push_back(Swap{detail::parse_half_edge(toks[1], lineno), detail::parse_half_edge(toks[2], lineno)});
    } else if (toks[0] == "connect") {
      want(4, "connect d.fwd e.fwd k");
      s.push_back(Connect{detail::parse_half_edge(toks[1], lineno), detail::parse_half_edge(toks[2], lineno),
                          detail::parse_int(toks[3], lineno).convert_to<long long>()});
    } else {
      throw ParseError("line " + std::to_string(lineno) + ": unknown move " + toks[0]);
    }
  }
  return s;
}

inline std::string serialize_move(const Move& m) {
  return std::visit(
      [](const auto& mm) -> std::string {
        using T = std::decay_t<decltype(mm)>;
        std::ostringstream os;
        if constexpr (std::is_same_v<T, VertexSign>) {
          os << "vsign " << mm.v;
        } else if constexpr (std::is_same_v<T, EdgeSign>) {
          os << "esign " << mm.e;
        } else if constexpr (std::is_same_v<T, Expand>) {
          os << "expand " << mm.at << " " << mm.k << " AS " << mm.new_vertex << " " << mm.new_edge;
        } else if constexpr (std::is_same_v<T, Contract>) {
          os << "contract " << mm.v;
        } else if constexpr (std::is_same_v<T, Slide>) {
          os << "slide " << mm.moved.str() << " along " << mm.along.str();
        } else if constexpr (std::is_same_v<T, Induct>) {
          os << "induct " << mm.loop.str() << " " << mm.ell << " " << mm.k;
        } else if constexpr (std::is_same_v<T, Swap>) {
          os << "swap " << mm.e1.str() << " " << mm.e2.str();
        } else {
          os << "connect " << mm.d.str() << " " << mm.e.str() << " " << mm.k;
        }
        return os.str();
      },
      m);
}

inline std::string serialize_script(const MoveScript& s) {
  std::ostringstream os;
  for (auto& m : s) os << serialize_move(m) << "\n";
  return os.str();
}

}  // namespace gbs
