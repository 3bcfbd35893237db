// Whole-pipeline driver: parse, lower, slice, guess norms, abstract in
// two tiers (without and with invariants), build the transition system,
// rank, merge, compute bounds, and render reports.
#pragma once

#include "loopbound/invariants.hpp"
#include "loopbound/oracle.hpp"

namespace lb {

struct AnalysisConfig {
  bool scc_mode = false;       // skip wrapping; entry values act as params
  size_t merge_threshold = 250;
  size_t path_cap = 5000;
  long long grid_max = 4;      // oracle grid 0..grid_max per parameter
  long long step_cap = 100000;
};

enum class AnalysisStatus {
  Ok,
  ParseError,
  Irreducible,
  RankingFailure,
  Unbounded,
};

struct AnalysisResult {
  AnalysisStatus status = AnalysisStatus::Ok;
  std::string error; // parse / irreducibility message

  Cfg source_cfg;    // as lowered from source (before wrapping/slicing)
  Cfg cfg;           // analyzed CFG (wrapped and sliced)
  LoopNest nest;
  LossyVass vass;
  TransitionSystem ts;        // one transition per loop path
  TransitionSystem merged_ts; // after ranking-preserving merges
  std::optional<LexRanking> lex;        // over ts
  std::optional<LexRanking> merged_lex; // over merged_ts
  std::optional<RankFailure> rank_failure;
  std::map<int, BoundExpr> iv;                     // norm id -> initial
  std::map<int, std::optional<BoundExpr>> bounds;  // transition id
  std::map<int, std::optional<BoundExpr>> loops;   // header location
  std::optional<BoundExpr> total;
  std::string complexity_class; // only when total is known

  std::vector<Assumption> assumptions;
  std::vector<std::string> failures;
};

AnalysisResult analyze_source(const std::string &source,
                              const AnalysisConfig &cfg = {});

std::string render_text(const AnalysisResult &r);
std::string render_json(const AnalysisResult &r);

/// stage: cfg | paths | vass | ts | ranking.
std::string render_dump(const AnalysisResult &r, const std::string &stage);

/// Builds the simulator for a completed analysis.
Oracle make_oracle(const AnalysisResult &r);

} // namespace lb
