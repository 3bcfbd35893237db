// Norm candidates: expressions that are non-negative by construction
// (max(base,0)) and strictly decrease on at least one loop-path.
#pragma once

#include "loopbound/paths.hpp"

namespace lb {

struct Norm {
  enum class Kind { Linear, Log };
  int id = -1;
  Kind kind = Kind::Linear;
  LinExpr base;     // Linear: the VASS variable is max(base, 0)
  Var log_var;      // Log: the VASS variable is floor(log2(max(v,1)))

  bool operator==(const Norm &o) const {
    return kind == o.kind && base == o.base && log_var == o.log_var;
  }
  std::string str() const;
};

/// Local ranking functions of one contracted loop-path: guards r >= 0
/// whose decrease delta = r - r' is a positive parameter-only constant.
std::vector<std::pair<LinExpr, LinExpr>>
find_local_rfs(const ContractedPath &rel, const Cfg &cfg);

/// Norms for all loop-paths: max(r+delta,0) per local ranking function,
/// plus log norms for halving updates guarded by v >= 2. Deduplicated,
/// ids in discovery order. Log-norm positivity assumptions appended.
std::vector<Norm> guess_norms(const Cfg &cfg, const LoopNest &nest,
                              const std::vector<LoopPath> &paths,
                              std::vector<Assumption> &assumptions);

} // namespace lb
