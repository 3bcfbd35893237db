#include "loopbound/analysis.hpp"

#include <algorithm>
#include <sstream>

#include "loopbound/fm.hpp"
#include "loopbound/slice.hpp"

#include <json.hpp>

namespace lb {

namespace {

std::map<int, BoundExpr> entry_param_iv(const std::vector<Norm> &norms) {
  // Per-SCC mode: variable values at the analyzed region's entry act as
  // fresh parameters, so the norm's own expression is its initial value.
  std::map<int, BoundExpr> iv;
  for (auto &n : norms) {
    if (n.kind == Norm::Kind::Log)
      iv.emplace(n.id, BoundExpr::log2ceil(
                           BoundExpr::sym(LinExpr::variable(n.log_var))));
    else
      iv.emplace(n.id, BoundExpr::max0(BoundExpr::sym(n.base)));
  }
  return iv;
}

std::string bound_str(const std::optional<BoundExpr> &b) {
  return b ? b->str() : "unbounded";
}

} // namespace

AnalysisResult analyze_source(const std::string &source,
                              const AnalysisConfig &config) {
  AnalysisResult r;
  Ast ast;
  try {
    ast = parse(source, r.assumptions);
  } catch (const ParseError &e) {
    r.status = AnalysisStatus::ParseError;
    r.error = e.what();
    return r;
  }
  Cfg cfg;
  try {
    cfg = build_cfg(ast);
  } catch (const CfgError &e) {
    r.status = AnalysisStatus::ParseError;
    r.error = e.what();
    return r;
  }
  r.source_cfg = cfg;
  LoopNest nest;
  try {
    nest = find_loops(cfg);
  } catch (const IrreducibleError &e) {
    r.status = AnalysisStatus::Irreducible;
    r.error = e.what();
    return r;
  }
  if (!config.scc_mode && needs_wrapping(cfg, nest))
    cfg = wrap_in_dummy_loop(cfg);
  cfg = slice(cfg);
  nest = find_loops(cfg);

  std::vector<LoopPath> paths;
  try {
    paths = enumerate_paths(cfg, nest, config.path_cap);
  } catch (const PathError &e) {
    r.status = AnalysisStatus::RankingFailure;
    r.error = e.what();
    r.cfg = std::move(cfg);
    r.nest = std::move(nest);
    return r;
  }

  // Infeasible paths can never complete an iteration.
  std::vector<Constraint> param_nonneg;
  for (auto &p : cfg.params) param_nonneg.push_back({LinExpr::variable(p)});
  {
    std::vector<LoopPath> feasible;
    for (auto &p : paths) {
      ContractedPath rel = contract(cfg, nest, p);
      std::vector<Constraint> sys = rel.guard;
      sys.insert(sys.end(), param_nonneg.begin(), param_nonneg.end());
      if (satisfiable(sys)) feasible.push_back(std::move(p));
    }
    paths = std::move(feasible);
  }

  std::vector<Norm> norms = guess_norms(cfg, nest, paths, r.assumptions);
  std::set<Var> uninit = maybe_uninit_reads(cfg);

  // Tier 1: norms that abstract without invariants give the execution
  // counts the invariant rules need.
  LossyVass vass1 = abstract_program(cfg, nest, paths, norms, nullptr);
  TransitionSystem ts1 =
      build_ts(vass1, cfg, nest, paths, config.merge_threshold);
  std::map<int, BoundExpr> iv1 =
      config.scc_mode ? entry_param_iv(ts1.norms)
                      : initial_values(cfg, nest, ts1.norms, uninit);

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
      auto lin = b->as_linear();
      if (!lin) return std::nullopt;
      total += *lin;
    }
    if (!on_path) return LinExpr(1); // outside every loop
    return total;
  };
  if (!config.scc_mode)
    ictx.initial = [&](const LinExpr &e) {
      return initial_linear(cfg, nest, e, uninit);
    };
  InvariantEngine engine(ictx);
  InvariantFn inv = [&](const LinExpr &e, int loc) {
    return engine.upper(e, loc);
  };

  // Tier 2: full abstraction with invariant support.
  r.vass = abstract_program(cfg, nest, paths, norms, &inv);
  r.ts = build_ts(r.vass, cfg, nest, paths, config.merge_threshold);
  prune_norms(r.vass, r.ts);
  for (auto &d : r.vass.dropped)
    r.failures.push_back("norm " + d.norm + " dropped at " +
                         cfg.loc_name(cfg.transitions[d.transition].src) +
                         "->" +
                         cfg.loc_name(cfg.transitions[d.transition].dst) +
                         ": " + d.reason);
  r.iv = config.scc_mode ? entry_param_iv(r.vass.norms)
                         : initial_values(cfg, nest, r.vass.norms, uninit);

  auto ranked = rank(r.ts);
  if (std::holds_alternative<RankFailure>(ranked)) {
    r.rank_failure = std::get<RankFailure>(ranked);
    r.status = AnalysisStatus::RankingFailure;
    r.failures.push_back(r.rank_failure->message);
  } else {
    r.lex = std::get<LexRanking>(ranked);
    r.merged_ts = r.ts;
    r.merged_lex = r.lex;
    merge_transitions(r.merged_ts, *r.merged_lex, cfg);
    r.bounds = compute_bounds(r.merged_ts, *r.merged_lex, r.iv);
    r.loops = loop_bounds(r.merged_ts, nest, r.bounds);
    r.total = total_bound(r.bounds);
    for (auto &t : r.merged_ts.transitions)
      if (!r.bounds.at(t.id)) {
        r.status = AnalysisStatus::Unbounded;
        r.failures.push_back("t " + t.name + ": unbounded");
      }
    if (r.total) r.complexity_class = asymptotic_class(*r.total);
  }

  std::sort(r.assumptions.begin(), r.assumptions.end());
  r.assumptions.erase(std::unique(r.assumptions.begin(), r.assumptions.end(),
                                  [](const Assumption &a, const Assumption &b) {
                                    return a.text == b.text &&
                                           a.line == b.line;
                                  }),
                      r.assumptions.end());
  r.cfg = std::move(cfg);
  r.nest = std::move(nest);
  return r;
}

std::string render_text(const AnalysisResult &r) {
  std::ostringstream os;
  if (r.status == AnalysisStatus::ParseError ||
      r.status == AnalysisStatus::Irreducible) {
    os << "error: " << r.error << "\n";
    return os.str();
  }
  if (!r.error.empty()) os << "error: " << r.error << "\n";
  if (r.rank_failure) {
    os << "ranking: failed (" << r.rank_failure->message << ")\n";
  } else {
    for (auto &t : r.merged_ts.transitions)
      os << "t " << t.name << ": bound " << bound_str(r.bounds.at(t.id))
         << "\n";
    for (auto &[header, b] : r.loops)
      os << "loop " << r.cfg.loc_name(header) << ": bound " << bound_str(b)
         << "\n";
    os << "total: " << bound_str(r.total) << "\n";
    os << "class: " << (r.total ? r.complexity_class : "unbounded") << "\n";
  }
  os << "assumptions:";
  if (r.assumptions.empty()) os << " none";
  os << "\n";
  for (auto &a : r.assumptions) os << "  - " << a.text << "\n";
  os << "failures:";
  if (r.failures.empty()) os << " none";
  os << "\n";
  for (auto &f : r.failures) os << "  - " << f << "\n";
  return os.str();
}

std::string render_json(const AnalysisResult &r) {
  nlohmann::json j;
  j["status"] = (int)r.status;
  j["error"] = r.error;
  j["transitions"] = nlohmann::json::array();
  j["loops"] = nlohmann::json::array();
  j["total"] = nullptr;
  j["class"] = nullptr;
  if (r.status != AnalysisStatus::ParseError &&
      r.status != AnalysisStatus::Irreducible && !r.rank_failure) {
    for (auto &t : r.merged_ts.transitions) {
      nlohmann::json jt;
      jt["name"] = t.name;
      jt["header"] = r.cfg.loc_name(t.header);
      auto &b = r.bounds.at(t.id);
      jt["bound"] = b ? nlohmann::json(b->str()) : nlohmann::json(nullptr);
      j["transitions"].push_back(std::move(jt));
    }
    for (auto &[header, b] : r.loops) {
      nlohmann::json jl;
      jl["header"] = r.cfg.loc_name(header);
      jl["bound"] = b ? nlohmann::json(b->str()) : nlohmann::json(nullptr);
      j["loops"].push_back(std::move(jl));
    }
    if (r.total) {
      j["total"] = r.total->str();
      j["class"] = r.complexity_class;
    }
  }
  j["assumptions"] = nlohmann::json::array();
  for (auto &a : r.assumptions)
    j["assumptions"].push_back({{"text", a.text}, {"line", a.line}});
  j["failures"] = r.failures;
  return j.dump(2) + "\n";
}

std::string render_dump(const AnalysisResult &r, const std::string &stage) {
  if (stage == "cfg") return r.source_cfg.dump();
  if (stage == "vass") return r.vass.dump(r.cfg);
  if (stage == "ts") return r.ts.dump(r.cfg);
  if (stage == "ranking") {
    if (r.lex) return r.lex->dump(r.ts);
    return "ranking failed: " + (r.rank_failure ? r.rank_failure->message
                                                : r.error) + "\n";
  }
  if (stage == "paths") {
    std::ostringstream os;
    for (size_t i = 0; i < r.ts.paths.size(); ++i) {
      const LoopPath &p = r.ts.paths[i];
      ContractedPath rel = contract(r.cfg, r.nest, p);
      os << "path " << (i + 1) << " (header "
         << r.cfg.loc_name(r.nest.loops[p.loop].header) << "):\n";
      os << "guards:";
      if (rel.guard.empty()) os << " -";
      for (size_t k = 0; k < rel.guard.size(); ++k)
        os << (k ? ", " : " ") << rel.guard[k].str();
      os << "\nupdates:";
      if (rel.update.empty()) os << " -";
      bool first = true;
      for (auto &[v, u] : rel.update) {
        os << (first ? " " : ", ") << v << " := " << u.str();
        first = false;
      }
      os << "\n";
    }
    return os.str();
  }
  throw std::runtime_error("unknown dump stage: " + stage);
}

Oracle make_oracle(const AnalysisResult &r) {
  const TransitionSystem &ts = r.merged_lex ? r.merged_ts : r.ts;
  return Oracle(r.cfg, r.nest, r.vass, ts, r.iv);
}

} // namespace lb
