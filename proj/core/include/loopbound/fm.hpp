// Fourier-Motzkin elimination over the rationals for conjunctions of
// linear constraints e >= 0. Used for path pruning and guard
// implication checks. Rational reasoning is sound for discarding
// (rational-unsat implies integer-unsat) and for claiming integer
// implications via the e <= -1 complement.
#pragma once

#include <vector>

#include "loopbound/linexpr.hpp"

namespace lb {

/// Rational satisfiability of the conjunction of `cs` (each expr >= 0).
/// Returns false only when the system is unsatisfiable over Q.
bool satisfiable(const std::vector<Constraint> &cs);

/// Integer-sound entailment: true when cs /\ (goal.expr <= -1) is
/// rationally unsatisfiable, which implies cs |= goal over Z.
bool entails(const std::vector<Constraint> &cs, const Constraint &goal);

/// Sign of `e` under `assumptions` plus non-negativity of every
/// variable in `nonneg_vars`. Falls back to Unknown when entailment
/// cannot settle it either way.
Sign sign_under(const LinExpr &e, const std::vector<Constraint> &assumptions,
                const std::set<Var> &nonneg_vars);

} // namespace lb
