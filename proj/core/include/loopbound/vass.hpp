// Abstraction of the control flow graph into a parameterized lossy
// VASS: one delta predicate x' <= x + c per surviving norm and CFG
// transition.
#pragma once

#include <functional>

#include "loopbound/norms.hpp"

namespace lb {

/// Upper-bound invariant oracle: parameter-only u with e <= u holding
/// whenever control is at the given location, or nullopt.
using InvariantFn =
    std::function<std::optional<LinExpr>(const LinExpr &e, int loc)>;

struct AbstractionDiag {
  std::string norm;
  int transition = -1;
  std::string reason;
};

struct LossyVass {
  std::vector<Norm> norms; // surviving norms, ids re-assigned densely
  // edge deltas indexed by CFG transition id, then norm id.
  std::vector<std::map<int, SymConst>> edges;
  std::vector<AbstractionDiag> dropped;

  std::string dump(const Cfg &cfg) const;
};

/// Per-norm, per-edge delta derivation. Holds the havocked prefix
/// contexts used to justify decrements (e + k >= 0 must be entailed by
/// the guards accumulated on every loop-path arriving at the edge).
class Abstractor {
public:
  Abstractor(const Cfg &cfg, const LoopNest &nest,
             const std::vector<LoopPath> &paths);

  /// Deltas for every CFG transition, or nullopt with a reason when
  /// some transition cannot be abstracted for this norm.
  std::optional<std::vector<SymConst>>
  abstract_norm(const Norm &n, const InvariantFn *inv, AbstractionDiag &why);

private:
  struct Context {
    std::vector<Constraint> guard; // havocked, at path entry
    UpdateMap sigma;
  };

  bool justified(int trans, const LinExpr &goal_pre) const;
  std::optional<SymConst> abstract_linear(const Norm &n, const Transition &t,
                                          const InvariantFn *inv,
                                          std::string &reason);
  std::optional<SymConst> abstract_log(const Norm &n, const Transition &t,
                                       std::string &reason);

  const Cfg &cfg_;
  std::set<Var> params_;
  std::vector<Constraint> param_nonneg_;
  std::map<int, std::vector<Context>> contexts_; // transition id -> contexts
};

/// Assembles the VASS over every norm the abstractor can handle;
/// failing norms are dropped and recorded.
LossyVass abstract_program(const Cfg &cfg, const LoopNest &nest,
                           const std::vector<LoopPath> &paths,
                           const std::vector<Norm> &norms,
                           const InvariantFn *inv);

} // namespace lb
