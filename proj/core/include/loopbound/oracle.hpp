// Concrete simulator for the abstracted system: exhaustive exploration
// of maximal-update traces, loop-path instance counting, and the
// soundness check of computed bounds over a parameter grid.
#pragma once

#include <random>

#include "loopbound/bounds.hpp"

namespace lb {

using Valuation = std::map<Var, long long>;

struct TraceStats {
  std::map<int, long long> path_max;  // ordered-path index -> max count
  std::map<int, long long> trans_max; // transition id -> max joint count
  long long total_max = 0;            // max instances over one trace
  long long max_steps = 0;
  bool cap_hit = false;
  bool divergent = false; // a trace revisited an identical state
  // Bounds promise instance counts for runs that reach the end
  // location; traces stuck mid-loop are outside that contract and are
  // not counted. False when no explored trace completed.
  bool completed = true;
};

/// Splits a walk (edge-id sequence) into loop-path instances with a
/// stack: on revisiting a location still on the stack, the enclosed
/// segment pops as one simple cycle, rotated to start at its loop
/// header. Returns the instances in completion order; edges not inside
/// any completed cycle are dropped (the acyclic prefix/suffix).
std::vector<std::vector<int>> decompose_cycles(const Cfg &cfg,
                                               const LoopNest &nest,
                                               const std::vector<int> &trace);

class Oracle {
public:
  Oracle(const Cfg &cfg, const LoopNest &nest, const LossyVass &vass,
         const TransitionSystem &ts, std::map<int, BoundExpr> iv);

  /// Deterministic exhaustive exploration with equality updates
  /// (x' = x + d, edge enabled only when all components stay >= 0);
  /// per-quantity maxima over all complete traces. Lossy traces are
  /// dominated by these, so the maxima are the true worst cases.
  TraceStats simulate(const Valuation &params, long long step_cap) const;

  /// One random lossy run (uniform losses). Instance counts can never
  /// exceed the equality maxima; used to test the dominance property.
  TraceStats lossy_run(const Valuation &params, std::mt19937 &rng,
                       long long step_cap) const;

private:
  friend struct SimState;
  const Cfg &cfg_;
  const LoopNest &nest_;
  const LossyVass &vass_;
  const TransitionSystem &ts_;
  std::map<int, BoundExpr> iv_;
  std::map<int, int> edge_loop_;            // edge -> innermost loop or -1
  std::map<std::vector<int>, int> path_of_; // edge seq -> ordered-path idx
  std::map<int, int> trans_of_path_;        // ordered-path idx -> trans id
};

struct SoundnessReport {
  bool ok = true;
  std::vector<std::string> lines;      // observed <= bound(value) table
  std::vector<std::string> violations; // with witness descriptions
};

/// Checks every computed bound against the simulator on the full
/// parameter grid 0..grid_max. `corrupt` is subtracted from every
/// evaluated bound to exercise the violation path in tests.
SoundnessReport check_soundness(
    const Oracle &oracle, const Cfg &cfg,
    const std::map<int, std::optional<BoundExpr>> &per_trans,
    const std::optional<BoundExpr> &total, long long grid_max,
    long long step_cap, long long corrupt = 0);

} // namespace lb
