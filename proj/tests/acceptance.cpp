// Acceptance gate: one pass/fail line per criterion, nonzero exit when
// any criterion fails.
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "loopbound/analysis.hpp"
#include "loopbound/norms.hpp"
#include "loopbound/slice.hpp"

using namespace lb;

namespace {

bool all_ok = true;

void report(int n, bool ok, const std::string &what) {
  std::cout << "criterion " << n << ": " << (ok ? "PASS" : "FAIL") << " - "
            << what << "\n";
  if (!ok) all_ok = false;
}

std::string read_program(const std::string &name) {
  std::ifstream in(std::string(TEST_PROGRAMS_DIR) + "/" + name);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

AnalysisResult analyze_file(const std::string &name,
                            const AnalysisConfig &cfg = {}) {
  return analyze_source(read_program(name), cfg);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string bound_of(const AnalysisResult &r, const std::string &name) {
  for (auto &t : r.merged_ts.transitions)
    if (t.name == name) {
      auto &b = r.bounds.at(t.id);
      return b ? b->str() : "unbounded";
    }
  return "<no transition " + name + ">";
}

std::vector<std::string> bounded_suite() {
  return {"fig1.imp",       "fig2.imp",     "example1.imp", "logloop.imp",
          "chain3.imp",     "sequential.imp", "nested2.imp",
          "amortized2.imp", "constantloop.imp", "straight.imp",
          "triangular.imp", "divstep.imp",  "empty.imp"};
}

std::vector<Valuation> grid_for(const Cfg &cfg, long long lo, long long hi) {
  std::vector<Valuation> grid{{}};
  for (auto &p : cfg.params) {
    std::vector<Valuation> next;
    for (auto &g : grid)
      for (long long v = lo; v <= hi; ++v) {
        Valuation g2 = g;
        g2[p] = v;
        next.push_back(std::move(g2));
      }
    grid = std::move(next);
  }
  return grid;
}

const char *kRho1 = "\xcf\x81\x31";
const char *kRho2 = "\xcf\x81\x32";
const char *kRho3 = "\xcf\x81\x33";
const char *kRho4 = "\xcf\x81\x34";

void criterion1() {
  auto t0 = std::chrono::steady_clock::now();
  AnalysisResult r = analyze_file("fig1.imp");
  double dt = seconds_since(t0);

  bool ok = r.status == AnalysisStatus::Ok && r.lex.has_value();
  // Four abstract transitions with the expected per-counter deltas.
  ok = ok && r.ts.dump(r.cfg) ==
                 "t1: a' <= a - 1; b' <= b + 1; i' <= i"
                 "  (header l1, path: l1->l2 l2->l1)\n"
                 "t2: a' <= a; b' <= b - 1; i' <= i + n-1"
                 "  (header l2, path: l2->l3 l3->l2)\n"
                 "t3: a' <= a; b' <= b; i' <= i - 1"
                 "  (header l3, path: l3->l4 l4->l3)\n"
                 "t4: a' <= a - 1; b' <= b + 1; i' <= i - 1"
                 "  (header l3, path: l3->l4 l4->l3)\n";
  // Lexicographic order (t1,a), (t4,a), (t2,b), (t3,i).
  if (ok) {
    auto &c = r.lex->comps;
    ok = c.size() == 4 && c[0].trans == 0 && c[1].trans == 3 &&
         c[2].trans == 1 && c[3].trans == 2 &&
         r.ts.norms[c[0].norm].str() == "a" &&
         r.ts.norms[c[1].norm].str() == "a" &&
         r.ts.norms[c[2].norm].str() == "b" &&
         r.ts.norms[c[3].norm].str() == "i";
  }
  ok = ok && bound_of(r, kRho2) == "n";
  ok = ok && bound_of(r, kRho3) == "n*(n-1)";
  // Middle loop: bound n.
  if (ok) {
    int l2 = -1;
    for (int l = 0; l < (int)r.cfg.num_locs(); ++l)
      if (r.cfg.loc_name(l) == "l2") l2 = l;
    auto it = r.loops.find(l2);
    ok = it != r.loops.end() && it->second && it->second->str() == "n";
  }
  ok = ok && r.complexity_class == "n^2" && dt < 1.0;
  report(1, ok, "three-level nest: 4 transitions, 4-component ranking, "
                "bounds n and n*(n-1), middle loop n, class n^2");
}

void criterion2() {
  auto t0 = std::chrono::steady_clock::now();
  AnalysisResult r = analyze_file("fig2.imp");
  double dt = seconds_since(t0);
  bool ok = r.status == AnalysisStatus::Ok &&
            r.ts.transitions.size() == 3 &&
            r.merged_ts.transitions.size() == 2 &&
            r.merged_ts.transitions[0].name == std::string(kRho1) + "+" + kRho2 &&
            bound_of(r, std::string(kRho1) + "+" + kRho2) == "m" &&
            bound_of(r, kRho3) == "m" && r.total && r.total->str() == "2*m" &&
            r.complexity_class == "n" && dt < 1.0;
  report(2, ok, "amortized two-phase loop: merge joins the first two "
                "transitions, bounds m and m, total 2*m, class n");
}

// Mirrors the analysis driver's first-tier setup to query the invariant
// engine directly.
void criterion3() {
  Cfg cfg = slice([] {
    std::vector<Assumption> as;
    return build_cfg(parse(read_program("example1.imp"), as));
  }());
  LoopNest nest = find_loops(cfg);
  auto paths = enumerate_paths(cfg, nest);
  std::vector<Assumption> as;
  auto norms = guess_norms(cfg, nest, paths, as);
  auto uninit = maybe_uninit_reads(cfg);
  LossyVass v1 = abstract_program(cfg, nest, paths, norms, nullptr);
  TransitionSystem ts1 = build_ts(v1, cfg, nest, paths, 250);
  auto iv1 = initial_values(cfg, nest, ts1.norms, uninit);

  InvariantContext ictx;
  ictx.cfg = &cfg;
  ictx.nest = &nest;
  ictx.params = std::set<Var>(cfg.params.begin(), cfg.params.end());
  ictx.exec_bound = [&](int trans) -> std::optional<LinExpr> {
    bool on_path = false;
    LinExpr total(0);
    for (auto &t : ts1.transitions) {
      bool contains = false;
      for (int p : t.paths)
        for (int e : ts1.paths[p].trans)
          if (e == trans) contains = true;
      if (!contains) continue;
      on_path = true;
      auto b = standalone_bound(ts1, iv1, t.id);
      if (!b) return std::nullopt;
      auto l = b->as_linear();
      if (!l) return std::nullopt;
      total += *l;
    }
    if (!on_path) return LinExpr(1);
    return total;
  };
  ictx.initial = [&](const LinExpr &e) {
    return initial_linear(cfg, nest, e, uninit);
  };
  InvariantEngine engine(ictx);

  int loc = -1;
  for (auto &t : cfg.transitions) {
    auto it = t.update.find("j");
    if (it != t.update.end() && it->second.kind == Update::Kind::Linear &&
        it->second.lin == LinExpr::variable("a"))
      loc = t.src;
  }
  LinExpr expect;
  expect.add_term("m", 1);
  expect.add_term("n", 4);
  auto u = loc >= 0 ? engine.upper(LinExpr::variable("a"), loc) : std::nullopt;
  bool ok = u.has_value() && *u == expect;

  AnalysisResult r = analyze_file("example1.imp");
  ok = ok && bound_of(r, kRho2) == "n*(m+4*n)";
  report(3, ok, "upper invariant on the growing reset source is m+4*n and "
                "the inner transition bound is n*(m+4*n)");
}

void criterion4() {
  AnalysisResult r = analyze_file("logloop.imp");
  bool ok = r.status == AnalysisStatus::Ok && r.total &&
            r.total->str() == "log2ceil(n)" && r.complexity_class == "log n";
  report(4, ok, "halving loop: bound log2ceil of the counter's initial "
                "value, class log n");
}

void criterion5() {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = bounded_suite().size() >= 12;
  for (auto &name : bounded_suite()) {
    AnalysisResult r = analyze_file(name);
    if (r.status != AnalysisStatus::Ok) {
      ok = false;
      continue;
    }
    Oracle oracle = make_oracle(r);
    SoundnessReport rep =
        check_soundness(oracle, r.cfg, r.bounds, r.total, 4, 100000);
    if (!rep.ok || !rep.violations.empty()) ok = false;
  }
  double dt = seconds_since(t0);
  ok = ok && dt < 120.0;
  std::ostringstream what;
  what << "observed instance counts stay within bounds on the 0..4 grid for "
       << bounded_suite().size() << " programs ("
       << (int)(dt * 1000) << " ms)";
  report(5, ok, what.str());
}

void criterion6() {
  bool ok = true;
  for (auto &name : bounded_suite()) {
    AnalysisResult r = analyze_file(name);
    if (r.status != AnalysisStatus::Ok || !r.lex) {
      ok = false;
      continue;
    }
    Oracle oracle = make_oracle(r);
    for (auto &g : grid_for(r.cfg, 0, 4)) {
      TraceStats st = oracle.simulate(g, 100000);
      if (!st.completed || st.cap_hit || st.divergent) ok = false;
    }
  }
  report(6, ok, "wherever ranking succeeds, every explored trace "
                "terminates below the step cap on the sampled grid");
}

void criterion7() {
  AnalysisResult up = analyze_file("nonterm.imp");
  AnalysisResult cyc = analyze_file("cyclic.imp");
  bool ok = up.status == AnalysisStatus::RankingFailure &&
            up.rank_failure &&
            up.rank_failure->kind == RankFailureKind::NoLocalRankingFunction &&
            cyc.status == AnalysisStatus::RankingFailure &&
            cyc.rank_failure &&
            cyc.rank_failure->kind == RankFailureKind::CyclicDependency;
  report(7, ok, "the two ranking-failure kinds are each triggered and "
                "classified by a dedicated program");
}

void criterion8() {
  // Chain of three transitions: t_i decrements x_i by one and
  // increments later counters by constants c12=3, c13=2, c23=5.
  const long long c12 = 3, c13 = 2, c23 = 5;
  TransitionSystem ts;
  for (int i = 0; i < 3; ++i) {
    Norm n;
    n.id = i;
    n.base = LinExpr::variable("x" + std::to_string(i + 1));
    ts.norms.push_back(std::move(n));
  }
  auto delta = [](long long c) {
    Delta d;
    d.lin = LinExpr(c);
    return d;
  };
  auto add_trans = [&](int id, long long d1, long long d2, long long d3) {
    AbstractTransition t;
    t.id = id;
    t.name = "t" + std::to_string(id + 1);
    t.deltas[0] = delta(d1);
    t.deltas[1] = delta(d2);
    t.deltas[2] = delta(d3);
    ts.transitions.push_back(std::move(t));
  };
  add_trans(0, -1, c12, c13);
  add_trans(1, 0, -1, c23);
  add_trans(2, 0, 0, -1);

  auto ranked = rank(ts);
  bool ok = std::holds_alternative<LexRanking>(ranked);
  if (ok) {
    std::map<int, BoundExpr> iv{
        {0, BoundExpr::sym(LinExpr::variable("v1"))},
        {1, BoundExpr::sym(LinExpr::variable("v2"))},
        {2, BoundExpr::sym(LinExpr::variable("v3"))}};
    auto bounds = compute_bounds(ts, std::get<LexRanking>(ranked), iv);
    auto &b3 = bounds.at(2);
    ok = b3.has_value();
    const long long pts[5][3] = {
        {0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 2, 3}, {4, 4, 4}};
    for (auto &p : pts) {
      if (!ok) break;
      Valuation v{{"v1", p[0]}, {"v2", p[1]}, {"v3", p[2]}};
      // Closed form: v3 + v1*c13 + v2*c23 + v1*c12*c23.
      long long expect = p[2] + p[0] * c13 + p[1] * c23 + p[0] * c12 * c23;
      ok = b3->eval(v) == expect;
    }
  }
  report(8, ok, "three-transition chain bound equals the closed-form sum "
                "v3 + v1*c13 + v2*c23 + v1*c12*c23 at 5 valuations");
}

void criterion9() {
  bool ok = true;
  for (auto &name : bounded_suite()) {
    AnalysisResult r = analyze_file(name);
    if (r.status != AnalysisStatus::Ok || !r.lex) continue;
    auto unmerged = compute_bounds(r.ts, *r.lex, r.iv);
    for (auto &g : grid_for(r.cfg, 0, 4)) {
      // Each merged transition against the joint bound of its sources.
      for (auto &mt : r.merged_ts.transitions) {
        auto &mb = r.bounds.at(mt.id);
        if (!mb) continue;
        long long sum = 0;
        bool known = true;
        for (auto &ut : r.ts.transitions) {
          bool covered = false;
          for (int p : ut.paths)
            for (int q : mt.paths)
              if (p == q) covered = true;
          if (!covered) continue;
          auto &ub = unmerged.at(ut.id);
          if (!ub) known = false;
          else sum += ub->eval(g);
        }
        if (known && mb->eval(g) > sum) ok = false;
      }
    }
  }
  report(9, ok, "merged bounds never exceed the summed unmerged bounds at "
                "any sampled valuation");
}

void criterion10() {
  namespace fs = std::filesystem;
  bool ok = true;
  for (auto &entry : fs::directory_iterator(TEST_PROGRAMS_DIR)) {
    if (entry.path().extension() != ".imp") continue;
    std::string name = entry.path().filename().string();
    std::string a = render_text(analyze_file(name));
    std::string b = render_text(analyze_file(name));
    if (a != b) ok = false;
  }
  report(10, ok, "two consecutive runs produce byte-identical reports for "
                 "every suite program");
}

} // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  return all_ok ? 0 : 1;
}
