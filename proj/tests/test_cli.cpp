// Golden tests for the command-line tool: bit-exact kv output per verb.
#include "doctest.h"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

namespace {

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run(const std::string& args) {
  std::string cmd = std::string(GBS_CLI) + " " + args + " 2>/dev/null";
  std::array<char, 4096> buf;
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  int st = pclose(p);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string sample(const std::string& name) { return std::string(GBS_SAMPLES) + "/" + name; }

std::string write_tmp(const std::string& name, const std::string& text) {
  std::string path = "/tmp/gbs_cli_" + name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("validate") {
  auto r = run("validate " + sample("fig_gbs.gbs"));
  CHECK(r.exit_code == 0);
  CHECK(r.out == "status ok\n");

  std::string bad = write_tmp("disconnected.gbs",
                              "gbs 1\nvertex a\nvertex b\nedge e a:2 a:4\n");
  auto r2 = run("validate " + bad);
  CHECK(r2.exit_code == 0);
  CHECK(r2.out == "status invalid\nreason graph is not connected\n");

  auto r3 = run("validate /nonexistent.gbs");
  CHECK(r3.exit_code != 0);
}

TEST_CASE("affine") {
  auto r = run("affine " + sample("fig_gbs.gbs"));
  CHECK(r.out ==
        "status ok\n"
        "-- affine\n"
        "edge e1 v +{2:2} u +{2:2,3:1}\n"
        "edge e2 v +{3:1} u +{3:1}\n"
        "edge e3 u +{} u +{2:3,3:1}\n");
}

TEST_CASE("apply") {
  std::string s = write_tmp("slide.mv", "slide s.fwd along c.fwd\n");
  auto r = run("apply " + sample("controlled_a.gbs") + " " + s);
  CHECK(r.out ==
        "status ok\n"
        "-- graph\n"
        "gbs 1\n"
        "vertex u\n"
        "edge c u:2 u:6\n"
        "edge s u:2 u:54\n");

  std::string bad = write_tmp("bad.mv", "slide e1.rev along e9.fwd\n");
  auto r2 = run("apply " + sample("fig_gbs.gbs") + " " + bad);
  CHECK(r2.exit_code == 0);
  CHECK(r2.out == "status failed\nstep 0\nreason unknown edge e9\n");
}

TEST_CASE("reduce") {
  auto r = run("reduce " + sample("fig_gbs.gbs"));
  CHECK(r.out ==
        "status ok\n"
        "steps 40\n"
        "-- graph\n"
        "gbs 1\n"
        "vertex v\n"
        "edge _e2 v:4 v:96\n"
        "edge e2 v:331776 v:3\n");
}

TEST_CASE("redundant and project") {
  auto r = run("redundant " + sample("fig_gbs.gbs") + " u");
  CHECK(r.out == "status yes\nloops e3.fwd\nexit e1.rev\n");
  auto r2 = run("redundant " + sample("fig_gbs.gbs") + " v");
  CHECK(r2.out == "status no\n");

  auto r3 = run("project " + sample("fig_gbs.gbs") + " u");
  CHECK(r3.out ==
        "status ok\n"
        "-- graph\n"
        "gbs 1\n"
        "vertex v\n"
        "edge e2 v:331776 v:3\n"
        "edge e3 v:4 v:96\n");

  auto r4 = run("project --moves " + sample("fig_gbs.gbs") + " u");
  CHECK(r4.out ==
        "status ok\n"
        "-- script\n"
        "induct e3.fwd 27648 4\n"
        "slide e1.fwd along e3.rev\n"
        "slide e1.fwd along e3.rev\n"
        "slide e1.fwd along e3.rev\n"
        "slide e1.fwd along e3.rev\n"
        "slide e2.fwd along e1.rev\n"
        "slide e3.fwd along e1.rev\n"
        "slide e3.rev along e1.rev\n"
        "contract u\n");

  auto r5 = run("project " + sample("fig_gbs.gbs") + " v");
  CHECK(r5.out == "status no\nreason vertex is not redundant\n");
}

TEST_CASE("conj") {
  auto r = run("conj " + sample("bs_1_2.gbs") + " a:1 a:2");
  CHECK(r.out == "status yes\n-- path\ne.fwd +{}\n");
  auto r2 = run("conj " + sample("bs_2_4.gbs") + " a:1 a:2");
  CHECK(r2.out == "status no\n");
  auto r3 = run("conj " + sample("fig_gbs.gbs") + " u:2 u:4 --budget 500");
  CHECK(r3.out == "status unknown\npruned true\n");
}

TEST_CASE("iso") {
  auto r = run("iso --controlled " + sample("controlled_a.gbs") + " " + sample("controlled_b.gbs"));
  CHECK(r.exit_code == 0);
  CHECK(r.out == "status yes\n");

  std::string other = write_tmp("other.gbs", "gbs 1\nvertex u\nedge c u:2 u:6\nedge s u:4 u:12\n");
  auto r2 = run("iso --controlled " + sample("controlled_a.gbs") + " " + other);
  CHECK(r2.exit_code == 0);
  CHECK(r2.out.substr(0, 10) == "status no\n");

  auto r3 = run("iso " + sample("controlled_a.gbs") + " " + sample("controlled_b.gbs"));
  CHECK(r3.exit_code == 2);
}

TEST_CASE("encode") {
  auto r = run("encode one-vertex --primes 11,13 " + sample("fig_gbs.gbs"));
  CHECK(r.out ==
        "status ok\n"
        "prime u 11\n"
        "prime v 13\n"
        "-- graph\n"
        "gbs 1\n"
        "vertex *\n"
        "edge e1 *:132 *:52\n"
        "edge e2 *:33 *:39\n"
        "edge e3 *:264 *:11\n");

  auto r2 = run("encode positive " + sample("controlled_a.gbs"));
  CHECK(r2.out ==
        "status ok\n"
        "prime q 5\n"
        "prime r 7\n"
        "-- graph\n"
        "gbs 1\n"
        "vertex u\n"
        "edge c u:294 u:98\n"
        "edge f u:175 u:7\n"
        "edge s u:882 u:98\n");
}

TEST_CASE("invariants") {
  auto r = run("invariants " + sample("controlled_a.gbs"));
  CHECK(r.out ==
        "status ok\n"
        "vertices 1\n"
        "edges 2\n"
        "rank 2\n"
        "primes 2 3\n"
        "controlled yes\n"
        "span +{}\n"
        "span +{3:1}\n"
        "base +{}\n"
        "satellite +{2:1}\n"
        "satellite +{2:1}\n");
}

TEST_CASE("dot") {
  auto r = run("dot " + sample("bs_1_2.gbs"));
  CHECK(r.out ==
        "status ok\n"
        "-- dot\n"
        "graph \"gbs\" {\n"
        "  node [shape=circle];\n"
        "  \"a\";\n"
        "  \"a\" -- \"a\" [label=\"e: (1, 2)\"];\n"
        "}\n");

  auto r2 = run("dot --affine " + sample("controlled_a.gbs"));
  CHECK(r2.out ==
        "status ok\n"
        "-- dot\n"
        "graph \"affine\" {\n"
        "  node [shape=point];\n"
        "  subgraph cluster0 {\n"
        "    label=\"u\";\n"
        "    p0 [shape=plaintext, label=\"+{2:1}\"];\n"
        "    p1 [shape=plaintext, label=\"+{2:1,3:1}\"];\n"
        "    p2 [shape=plaintext, label=\"+{2:1,3:2}\"];\n"
        "  }\n"
        "  p0 -- p1 [label=\"c\"];\n"
        "  p0 -- p2 [label=\"s\"];\n"
        "}\n");
}

TEST_CASE("json format") {
  auto r = run("--format json validate " + sample("fig_gbs.gbs"));
  CHECK(r.out == "{\n  \"kv\": [\n    [\n      \"status\",\n      \"ok\"\n    ]\n  ]\n}\n");
  auto r2 = run("validate " + sample("fig_gbs.gbs") + " --format json");
  CHECK(r2.out == r.out);
}
