// Simulator tests: cycle decomposition, worst-case trace counts,
// dominance of lossy runs, and grid soundness of the computed bounds.
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "loopbound/analysis.hpp"

using namespace lb;

namespace {

std::string read_program(const std::string &name) {
  std::ifstream in(std::string(TEST_PROGRAMS_DIR) + "/" + name);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

AnalysisResult analyze_file(const std::string &name,
                            const AnalysisConfig &cfg = {}) {
  return analyze_source(read_program(name), cfg);
}

Cfg cfg_of(const std::string &name) {
  std::vector<Assumption> as;
  return build_cfg(parse(read_program(name), as));
}

int loc_by_name(const Cfg &cfg, const std::string &name) {
  for (int l = 0; l < (int)cfg.num_locs(); ++l)
    if (cfg.loc_name(l) == name) return l;
  FAIL("no location ", name);
  return -1;
}

int edge_between(const Cfg &cfg, const std::string &src,
                 const std::string &dst) {
  int s = loc_by_name(cfg, src), d = loc_by_name(cfg, dst);
  for (auto &t : cfg.transitions)
    if (t.src == s && t.dst == d) return t.id;
  FAIL("no edge ", src, "->", dst);
  return -1;
}

} // namespace

TEST_CASE("cycle decomposition splits a walk into loop-path instances") {
  Cfg cfg = cfg_of("fig1.imp");
  LoopNest nest = find_loops(cfg);
  int l1_l2 = edge_between(cfg, "l1", "l2");
  int l2_l3 = edge_between(cfg, "l2", "l3");
  int l3_l4 = edge_between(cfg, "l3", "l4");
  int l4_l3 = edge_between(cfg, "l4", "l3");
  int l3_l2 = edge_between(cfg, "l3", "l2");
  int l2_l1 = edge_between(cfg, "l2", "l1");

  // l1 -> l2 -> l3 -> l4 -> l3 -> l2 -> l3 -> l2 -> l1: the middle
  // iteration encloses one inner iteration and is itself interrupted by
  // a second middle iteration before the outer one closes.
  std::vector<int> trace{l1_l2, l2_l3, l3_l4, l4_l3,
                         l3_l2, l2_l3, l3_l2, l2_l1};
  auto inst = decompose_cycles(cfg, nest, trace);
  REQUIRE(inst.size() == 4);
  // Completion order: innermost closes first, outermost last. Each
  // instance starts at its loop header.
  CHECK(inst[0] == std::vector<int>{l3_l4, l4_l3});
  CHECK(inst[1] == std::vector<int>{l2_l3, l3_l2});
  CHECK(inst[2] == std::vector<int>{l2_l3, l3_l2});
  CHECK(inst[3] == std::vector<int>{l1_l2, l2_l1});
}

TEST_CASE("cycle decomposition drops acyclic prefix and suffix") {
  Cfg cfg = cfg_of("fig2.imp");
  LoopNest nest = find_loops(cfg);
  int in = edge_between(cfg, "begin", "l1");
  int l1_l2 = edge_between(cfg, "l1", "l2");
  int l2_l1 = edge_between(cfg, "l2", "l1");
  int out = edge_between(cfg, "l1", "end");
  auto inst = decompose_cycles(cfg, nest, {in, l1_l2, l2_l1, out});
  REQUIRE(inst.size() == 1);
  CHECK(inst[0] == std::vector<int>{l1_l2, l2_l1});
  CHECK(decompose_cycles(cfg, nest, {in, out}).empty());
}

TEST_CASE("worst-case counts of the amortized example") {
  AnalysisResult r = analyze_file("fig2.imp");
  REQUIRE(r.status == AnalysisStatus::Ok);
  Oracle oracle = make_oracle(r);
  // Outer phase runs m times; every inner decrement consumes one of the
  // m-1 increments completed before the last outer iteration.
  for (long long m = 0; m <= 5; ++m) {
    CAPTURE(m);
    TraceStats st = oracle.simulate({{"m", m}}, 100000);
    REQUIRE_FALSE(st.cap_hit);
    REQUIRE_FALSE(st.divergent);
    long long t1 = r.merged_ts.transitions[0].id;
    long long t3 = r.merged_ts.transitions[1].id;
    CHECK(st.trans_max.at((int)t1) == m);
    CHECK(st.trans_max.at((int)t3) == std::max(m - 1, 0LL));
    CHECK(st.total_max == std::max(2 * m - 1, 0LL));
  }
}

TEST_CASE("lossy runs never beat the equality worst case") {
  std::mt19937 rng(20240817);
  for (const char *name : {"fig1.imp", "fig2.imp", "chain3.imp"}) {
    CAPTURE(name);
    AnalysisResult r = analyze_file(name);
    REQUIRE(r.status == AnalysisStatus::Ok);
    Oracle oracle = make_oracle(r);
    Valuation params;
    for (auto &p : r.cfg.params) params[p] = 4;
    TraceStats best = oracle.simulate(params, 100000);
    REQUIRE_FALSE(best.cap_hit);
    for (int run = 0; run < 40; ++run) {
      CAPTURE(run);
      TraceStats lossy = oracle.lossy_run(params, rng, 100000);
      // Bounds only cover runs reaching the end location; a lossy walk
      // may strand itself mid-loop.
      if (!lossy.completed) continue;
      for (auto &[p, c] : lossy.path_max) CHECK(c <= best.path_max.at(p));
      for (auto &[t, c] : lossy.trans_max) CHECK(c <= best.trans_max.at(t));
      CHECK(lossy.total_max <= best.total_max);
    }
  }
}

TEST_CASE("bounds hold on the parameter grid") {
  namespace fs = std::filesystem;
  for (auto &entry : fs::directory_iterator(TEST_PROGRAMS_DIR)) {
    if (entry.path().extension() != ".imp") continue;
    std::string name = entry.path().filename().string();
    CAPTURE(name);
    AnalysisResult r = analyze_file(name);
    if (r.status != AnalysisStatus::Ok) continue;
    Oracle oracle = make_oracle(r);
    SoundnessReport rep =
        check_soundness(oracle, r.cfg, r.bounds, r.total, 3, 100000);
    CHECK(rep.ok);
    CHECK(rep.violations.empty());
  }
}

TEST_CASE("the corrupt knob produces reported violations") {
  AnalysisResult r = analyze_file("fig2.imp");
  Oracle oracle = make_oracle(r);
  SoundnessReport rep =
      check_soundness(oracle, r.cfg, r.bounds, r.total, 3, 100000, 1);
  CHECK_FALSE(rep.ok);
  CHECK_FALSE(rep.violations.empty());
  for (auto &v : rep.violations)
    CHECK(v.find("VIOLATION") != std::string::npos);
}

TEST_CASE("a non-terminating system exhausts the step cap") {
  AnalysisResult r = analyze_file("nonterm.imp");
  REQUIRE(r.status == AnalysisStatus::RankingFailure);
  Oracle oracle = make_oracle(r);
  TraceStats st = oracle.simulate({{"x0", 1}}, 2000);
  CHECK((st.cap_hit || st.divergent));
}
