// Control flow abstraction: one abstract transition per loop-path,
// carrying the summed per-norm delta of the path's edges.
#pragma once

#include "loopbound/vass.hpp"

namespace lb {

/// Sum of edge deltas along a path: a parameter-only linear part plus
/// max(.,0) terms from unknown-sign edge deltas. The whole delta is an
/// upper bound on the real change, never exact.
struct Delta {
  LinExpr lin;
  std::vector<LinExpr> max_terms; // sorted; each adds max(term,0)

  static Delta from(const SymConst &c);

  bool is_zero() const { return lin.is_zero() && max_terms.empty(); }
  bool cert_negative() const {
    return max_terms.empty() && syntactic_sign(lin) == Sign::Negative;
  }
  bool cert_nonpos() const {
    return max_terms.empty() && sign_nonpos(syntactic_sign(lin));
  }
  /// Constant decrement magnitude for the bound division; symbolic
  /// decrements divide by 1.
  long long dec_magnitude() const {
    return lin.is_constant() && lin.constant < 0 ? -lin.constant : 1;
  }

  long long eval(const std::map<Var, long long> &val) const;
  Delta &operator+=(const Delta &o);
  bool operator==(const Delta &o) const {
    return lin == o.lin && max_terms == o.max_terms;
  }
  bool operator<(const Delta &o) const {
    if (!(lin == o.lin)) return lin < o.lin;
    return max_terms < o.max_terms;
  }
  std::string str() const; // "-1", "n-1", "max(n-1,0)", "1+max(m,0)"
};

struct AbstractTransition {
  int id = -1;
  std::string name;             // rho-numbered in id order
  int header = -1;              // header location of the source loop
  std::map<int, Delta> deltas;  // norm id -> delta
  std::vector<int> paths;       // provenance: indices into the path list
};

struct TransitionSystem {
  std::vector<Norm> norms;
  std::vector<LoopPath> paths;  // canonical order (see order_paths)
  std::vector<AbstractTransition> transitions;
  bool merged_by_threshold = false;

  std::string dump(const Cfg &cfg) const;
};

/// Canonical order: loops by header location id; within a loop, paths
/// by total guard-constraint count, then by transition-id sequence.
std::vector<LoopPath> order_paths(const Cfg &cfg, const LoopNest &nest,
                                  std::vector<LoopPath> paths);

/// Builds the transition system. When a loop has more than
/// `merge_threshold` paths, paths with identical delta vectors collapse
/// into one transition.
TransitionSystem build_ts(const LossyVass &vass, const Cfg &cfg,
                          const LoopNest &nest, std::vector<LoopPath> paths,
                          size_t merge_threshold);

/// Removes norms that no transition certainly decreases; they can never
/// serve as ranking components. Re-ids the survivors densely in both
/// structures.
void prune_norms(LossyVass &vass, TransitionSystem &ts);

} // namespace lb
