// Upper/lower parameter bounds on expressions at a location, derived by
// four proof rules: dominating-condition harvesting, never-changed
// initial values, linear decomposition, and reaching-definition case
// analysis with increment counting.
#pragma once

#include <functional>

#include "loopbound/loops.hpp"

namespace lb {

struct InvariantContext {
  const Cfg *cfg = nullptr;
  const LoopNest *nest = nullptr;
  std::set<Var> params;
  /// Parameter-only upper bound on how often the CFG transition can
  /// execute over a whole run; nullopt when unknown or non-linear.
  std::function<std::optional<LinExpr>(int trans)> exec_bound;
  /// Parameter-only value of the expression at program entry.
  std::function<std::optional<LinExpr>(const LinExpr &)> initial;
  int budget = 3;
};

/// Engine with a per-analysis memo table; one instance per run.
class InvariantEngine {
public:
  explicit InvariantEngine(InvariantContext ctx);

  /// Parameter-only u with e <= u whenever control is at loc.
  std::optional<LinExpr> upper(const LinExpr &e, int loc);
  /// Parameter-only lo with lo <= e whenever control is at loc.
  std::optional<LinExpr> lower(const LinExpr &e, int loc);

private:
  std::optional<LinExpr> bound(const LinExpr &e, int loc, bool up,
                               int budget);
  std::optional<LinExpr> by_condition(const LinExpr &e, int loc, bool up);
  std::optional<LinExpr> by_stability(const LinExpr &e, bool up);
  std::optional<LinExpr> by_decomposition(const LinExpr &e, int loc, bool up,
                                          int budget);
  std::optional<LinExpr> by_definitions(const Var &v, int loc, int budget);
  const std::vector<Constraint> &conditions_at(int loc);

  InvariantContext ctx_;
  std::vector<int> idom_;
  std::map<int, std::vector<Constraint>> cond_memo_;
  std::map<std::tuple<LinExpr, int, bool>, std::optional<LinExpr>> memo_;
  std::set<std::tuple<LinExpr, int, bool>> in_progress_;
};

} // namespace lb
