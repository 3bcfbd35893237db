// Path-bound computation: initial norm values, transition merging,
// the recursive bound formula over the lexicographic order, loop-bound
// aggregation and whole-program complexity.
#pragma once

#include "loopbound/boundexpr.hpp"
#include "loopbound/ranking.hpp"

namespace lb {

/// True when the program shape requires the dummy outer loop: not
/// exactly one outermost loop, or code before it that is not a straight
/// chain of assignments.
bool needs_wrapping(const Cfg &cfg, const LoopNest &nest);

/// Wraps the whole body into `while ($w > 0) { ...; $w := $w - 1 }`
/// seeded with $w := 1, so every program has a single outermost loop.
Cfg wrap_in_dummy_loop(const Cfg &cfg);

/// Transition ids of the straight chain begin -> outermost header.
/// Requires !needs_wrapping.
std::vector<int> entry_chain(const Cfg &cfg, const LoopNest &nest);

/// Variables the program may read before assigning them; their entry
/// values are observable and therefore unknown.
std::set<Var> maybe_uninit_reads(const Cfg &cfg);

/// Parameter-only value of e at the outermost header's first entry:
/// e pulled backward through the entry chain; leftover non-parameter
/// variables are unobservable before their first assignment and default
/// to 0, unless the program may read them uninitialized.
std::optional<LinExpr> initial_linear(const Cfg &cfg, const LoopNest &nest,
                                      const LinExpr &e,
                                      const std::set<Var> &uninit);

/// Initial value per norm id (norm value at first header entry); norms
/// with unknown initial value are absent.
std::map<int, BoundExpr> initial_values(const Cfg &cfg, const LoopNest &nest,
                                        const std::vector<Norm> &norms,
                                        const std::set<Var> &uninit);

/// Upper bound on the positive contribution of a delta per execution.
BoundExpr pos_part(const Delta &d);

/// Merges ranking components that share a norm and have the identical
/// delta on it; the merged transition takes the componentwise larger
/// delta on every norm (pairs with incomparable deltas stay separate).
/// Keeps the earlier transition's id and lex slot; names concatenate.
void merge_transitions(TransitionSystem &ts, LexRanking &lex,
                       const Cfg &cfg);

/// Bound per transition id along the ranking: initial value plus paid-in
/// increments, divided by the decrement magnitude. nullopt = unbounded.
std::map<int, std::optional<BoundExpr>>
compute_bounds(const TransitionSystem &ts, const LexRanking &lex,
               const std::map<int, BoundExpr> &iv);

/// Bound for one transition without a global ranking: first norm it
/// certainly decreases that closes without cyclic paying-in. Used by
/// the counting tier that feeds invariant generation.
std::optional<BoundExpr> standalone_bound(const TransitionSystem &ts,
                                          const std::map<int, BoundExpr> &iv,
                                          int trans);

/// Loop bound per header location: sum of the bounds of transitions
/// with at least one source path in that loop; a merged transition's
/// joint bound counts once per header.
std::map<int, std::optional<BoundExpr>>
loop_bounds(const TransitionSystem &ts, const LoopNest &nest,
            const std::map<int, std::optional<BoundExpr>> &per_trans);

/// Whole-program bound: every transition's bound summed once.
std::optional<BoundExpr>
total_bound(const std::map<int, std::optional<BoundExpr>> &per_trans);

} // namespace lb
