// Command-line front end.  Every verb reads the text formats from
// gbs/format.hpp and emits a flat key-value document (or the same pairs as
// JSON with --format json); exit code 0 means the verb completed with some
// verdict, nonzero means usage or input errors.
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gbs/controlled.hpp"
#include "gbs/derived.hpp"
#include "gbs/dot.hpp"
#include "gbs/encode.hpp"
#include "gbs/format.hpp"
#include "gbs/graph.hpp"
#include "gbs/moves.hpp"
#include "gbs/reduction.hpp"

namespace {

struct Output {
  std::vector<std::pair<std::string, std::string>> kv;
  std::vector<std::pair<std::string, std::string>> blocks;  // name -> multi-line text
  bool json = false;

  void put(const std::string& k, const std::string& v) { kv.emplace_back(k, v); }
  void block(const std::string& name, const std::string& text) { blocks.emplace_back(name, text); }

  void render(std::ostream& os) const {
    if (json) {
      nlohmann::json j;
      j["kv"] = nlohmann::json::array();
      for (auto& [k, v] : kv) j["kv"].push_back({k, v});
      for (auto& [n, t] : blocks) j["blocks"][n] = t;
      os << j.dump(2) << "\n";
      return;
    }
    for (auto& [k, v] : kv) os << k << " " << v << "\n";
    for (auto& [n, t] : blocks) {
      os << "-- " << n << "\n" << t;
      if (!t.empty() && t.back() != '\n') os << "\n";
    }
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

gbs::GbsGraph load_graph(const std::string& path) {
  try {
    return gbs::parse_graph(slurp(path));
  } catch (const gbs::ParseError& e) {
    throw CLI::ValidationError(path + ": " + e.what());
  }
}

gbs::MoveScript load_script(const std::string& path) {
  try {
    return gbs::parse_script(slurp(path));
  } catch (const gbs::ParseError& e) {
    throw CLI::ValidationError(path + ": " + e.what());
  }
}

void write_or_block(Output& out, const std::string& opath, const std::string& name,
                    const std::string& text) {
  if (opath.empty()) {
    out.block(name, text);
    return;
  }
  std::ofstream o(opath);
  if (!o) throw CLI::ValidationError("cannot write " + opath);
  o << text;
  out.put("wrote", opath);
}

// "v:12" -> affine point at v with the factorization of 12.
gbs::AffinePoint parse_point(const std::string& s) {
  size_t c = s.rfind(':');
  if (c == std::string::npos || c == 0 || c + 1 == s.size())
    throw CLI::ValidationError("point must be <vertex>:<integer>, got " + s);
  try {
    return {s.substr(0, c), gbs::factorize(gbs::Int(s.substr(c + 1)))};
  } catch (const std::exception& e) {
    throw CLI::ValidationError("bad point " + s + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generalized Baumslag-Solitar graph toolkit"};
  app.require_subcommand(1);

  std::string format = "kv";
  long long seed = 0;
  long long budget = 1000000;
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"kv", "json"}));
  app.add_option("--seed", seed, "seed for randomized behavior (all verbs are deterministic)");
  app.add_option("--budget", budget, "state budget for searches")->check(CLI::PositiveNumber);

  std::string gpath, g2path, spath, opath, vertex, point1, point2, allow, primes, mode;
  bool moves = false, affine = false, controlled = false;

  auto* validate = app.add_subcommand("validate", "parse and check a graph file");
  validate->add_option("graph", gpath)->required();

  auto* affv = app.add_subcommand("affine", "print the affine representation");
  affv->add_option("graph", gpath)->required();

  auto* applyv = app.add_subcommand("apply", "replay a move script");
  applyv->add_option("graph", gpath)->required();
  applyv->add_option("script", spath)->required();
  applyv->add_option("-o,--out", opath, "write the resulting graph here");

  auto* reducev = app.add_subcommand("reduce", "compute a totally reduced form");
  reducev->add_option("graph", gpath)->required();
  reducev->add_option("-o,--out", opath);
  std::string scriptout;
  reducev->add_option("--script", scriptout, "write the reducing script here");

  auto* redv = app.add_subcommand("redundant", "test a vertex for redundancy");
  redv->add_option("graph", gpath)->required();
  redv->add_option("vertex", vertex)->required();

  auto* projv = app.add_subcommand("project", "eliminate a redundant vertex");
  projv->add_option("graph", gpath)->required();
  projv->add_option("vertex", vertex)->required();
  projv->add_option("-o,--out", opath);
  projv->add_flag("--moves", moves, "emit the projection as a move script");

  auto* conjv = app.add_subcommand("conj", "decide conjugacy of two elliptic elements");
  conjv->add_option("graph", gpath)->required();
  conjv->add_option("from", point1, "<vertex>:<integer>")->required();
  conjv->add_option("to", point2, "<vertex>:<integer>")->required();

  auto* isov = app.add_subcommand("iso", "decide isomorphism (controlled case)");
  isov->add_option("graph1", gpath)->required();
  isov->add_option("graph2", g2path)->required();
  isov->add_flag("--controlled", controlled, "first graph is one-vertex controlled");
  isov->add_option("--allow", allow, "comma list of sign,induction");

  auto* encv = app.add_subcommand("encode", "one-vertex or positive encoding");
  encv->add_option("mode", mode)->required()->check(CLI::IsMember({"one-vertex", "positive"}));
  encv->add_option("graph", gpath)->required();
  encv->add_option("--primes", primes, "comma list overriding the fresh primes");
  encv->add_option("-o,--out", opath);

  auto* invv = app.add_subcommand("invariants", "rank, primes, controlled invariant");
  invv->add_option("graph", gpath)->required();

  auto* dotv = app.add_subcommand("dot", "DOT rendering");
  dotv->add_option("graph", gpath)->required();
  dotv->add_flag("--affine", affine, "draw the affine representation");

  for (auto* sc : app.get_subcommands([](const CLI::App*) { return true; })) sc->fallthrough();

  CLI11_PARSE(app, argc, argv);

  Output out;
  out.json = format == "json";

  try {
    if (*validate) {
      try {
        gbs::GbsGraph g = gbs::parse_graph(slurp(gpath));
        std::string r = g.validate();
        out.put("status", r.empty() ? "ok" : "invalid");
        if (!r.empty()) out.put("reason", r);
      } catch (const gbs::ParseError& e) {
        out.put("status", "invalid");
        out.put("reason", e.what());
      }
    } else if (*affv) {
      gbs::GbsGraph g = load_graph(gpath);
      gbs::AffineGraph a = gbs::to_affine(g);
      out.put("status", "ok");
      std::ostringstream os;
      for (auto& [id, e] : a.edges)
        os << "edge " << id << " " << e.from.vertex << " " << gbs::to_string(e.from.coord) << " "
           << e.to.vertex << " " << gbs::to_string(e.to.coord) << "\n";
      out.block("affine", os.str());
    } else if (*applyv) {
      gbs::GbsGraph g = load_graph(gpath);
      gbs::ReplayResult r = gbs::replay(g, load_script(spath));
      if (!r.ok) {
        out.put("status", "failed");
        out.put("step", std::to_string(r.steps.back().index));
        out.put("reason", r.steps.back().reason);
      } else {
        out.put("status", "ok");
        write_or_block(out, opath, "graph", gbs::serialize_graph(r.graph));
      }
    } else if (*reducev) {
      gbs::GbsGraph g = load_graph(gpath);
      auto [h, s] = gbs::totally_reduce(g);
      out.put("status", "ok");
      out.put("steps", std::to_string(s.size()));
      write_or_block(out, opath, "graph", gbs::serialize_graph(h));
      if (!scriptout.empty()) {
        std::ofstream o(scriptout);
        o << gbs::serialize_script(s);
        out.put("wrote-script", scriptout);
      }
    } else if (*redv) {
      gbs::GbsGraph g = load_graph(gpath);
      if (!g.has_vertex(vertex)) throw CLI::ValidationError("unknown vertex " + vertex);
      auto data = gbs::is_redundant(g, vertex);
      out.put("status", data ? "yes" : "no");
      if (data) {
        std::string loops;
        for (auto& h : data->loops) loops += (loops.empty() ? "" : " ") + h.str();
        out.put("loops", loops);
        out.put("exit", data->exit.str());
      }
    } else if (*projv) {
      gbs::GbsGraph g = load_graph(gpath);
      if (!g.has_vertex(vertex)) throw CLI::ValidationError("unknown vertex " + vertex);
      auto data = gbs::is_redundant(g, vertex);
      if (!data) {
        out.put("status", "no");
        out.put("reason", "vertex is not redundant");
      } else {
        auto cs = gbs::default_constants(g, *data);
        out.put("status", "ok");
        if (moves) {
          out.block("script", gbs::serialize_script(gbs::project_as_moves(g, *data, cs)));
        } else {
          write_or_block(out, opath, "graph", gbs::serialize_graph(gbs::project(g, *data, cs)));
        }
      }
    } else if (*conjv) {
      gbs::GbsGraph g = load_graph(gpath);
      gbs::AffinePoint p = parse_point(point1), q = parse_point(point2);
      if (!g.has_vertex(p.vertex) || !g.has_vertex(q.vertex))
        throw CLI::ValidationError("points must name vertices of the graph");
      auto v = gbs::conjugate(g, p, q, -1, static_cast<size_t>(budget));
      out.put("status", v.kind == gbs::ConjVerdict::Kind::yes      ? "yes"
                        : v.kind == gbs::ConjVerdict::Kind::no     ? "no"
                                                                   : "unknown");
      if (v.kind == gbs::ConjVerdict::Kind::yes) {
        std::ostringstream os;
        for (auto& st : v.path) os << st.edge.str() << " " << gbs::to_string(st.w) << "\n";
        out.block("path", os.str());
      }
      if (v.pruned) out.put("pruned", "true");
    } else if (*isov) {
      if (!controlled) {
        std::cerr << "iso: only the controlled case is decided; rerun with --controlled "
                     "and a one-vertex controlled first graph\n";
        return 2;
      }
      gbs::GbsGraph g1 = load_graph(gpath), g2 = load_graph(g2path);
      gbs::IsoAllow a;
      std::stringstream ss(allow);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        if (tok == "sign")
          a.sign_changes = true;
        else if (tok == "induction")
          a.inductions = true;
        else if (!tok.empty())
          throw CLI::ValidationError("unknown --allow item " + tok);
      }
      gbs::Decision d = gbs::iso_controlled(g1, g2, a);
      out.put("status", d.yes ? "yes" : "no");
      if (!d.reason.empty()) out.put("reason", d.reason);
    } else if (*encv) {
      gbs::GbsGraph g = load_graph(gpath);
      std::vector<long long> ps;
      if (!primes.empty()) {
        std::stringstream ss(primes);
        std::string tok;
        while (std::getline(ss, tok, ',')) ps.push_back(std::stoll(tok));
      }
      if (mode == "one-vertex") {
        gbs::PrimeAssignment pa;
        if (ps.empty()) {
          pa = gbs::assign_vertex_primes(g);
        } else {
          if (ps.size() != g.vertices.size())
            throw CLI::ValidationError("--primes needs one prime per vertex");
          size_t i = 0;
          for (auto& v : g.vertices) pa.prime[v] = ps[i++];
        }
        gbs::GbsGraph h = gbs::encode_one_vertex(g, pa);
        out.put("status", "ok");
        for (auto& [v, pr] : pa.prime) out.put("prime", v + " " + std::to_string(pr));
        write_or_block(out, opath, "graph", gbs::serialize_graph(h));
      } else {
        if (ps.empty()) ps = gbs::fresh_primes(g, 2);
        if (ps.size() != 2) throw CLI::ValidationError("--primes needs exactly q,r");
        gbs::GbsGraph h = gbs::encode_positive(g, ps[0], ps[1]);
        out.put("status", "ok");
        out.put("prime", "q " + std::to_string(ps[0]));
        out.put("prime", "r " + std::to_string(ps[1]));
        write_or_block(out, opath, "graph", gbs::serialize_graph(h));
      }
    } else if (*invv) {
      gbs::GbsGraph g = load_graph(gpath);
      out.put("status", "ok");
      out.put("vertices", std::to_string(g.vertices.size()));
      out.put("edges", std::to_string(g.edges.size()));
      out.put("rank", std::to_string(g.rank()));
      std::string pl;
      for (long long p : g.set_of_primes()) pl += (pl.empty() ? "" : " ") + std::to_string(p);
      out.put("primes", pl.empty() ? "-" : pl);
      if (g.vertices.size() == 1) {
        gbs::ControlResult c = gbs::is_controlled(g);
        out.put("controlled", c.config ? "yes" : "no");
        if (c.config) {
          gbs::ControlledInvariant inv = gbs::invariant_of_graph(g);
          for (auto& gen : inv.H.generators()) out.put("span", gbs::to_string(gen));
          out.put("base", gbs::to_string(inv.a));
          for (auto& b : inv.bases) out.put("satellite", gbs::to_string(b));
        } else if (!c.reason.empty()) {
          out.put("reason", c.reason);
        }
      }
    } else if (*dotv) {
      gbs::GbsGraph g = load_graph(gpath);
      out.put("status", "ok");
      out.block("dot", affine ? gbs::affine_to_dot(g) : gbs::to_dot(g));
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  out.render(std::cout);
  return 0;
}
