// Guard-relevance slicing: drops updates of variables that can never
// influence a guard, shrinking the path/abstraction workload.
#pragma once

#include "loopbound/cfg.hpp"

namespace lb {

/// Variables relevant to control flow: everything read by a guard,
/// closed transitively under use-def through updates.
std::set<Var> guard_relevant_vars(const Cfg &cfg);

/// Copy of `cfg` with updates to irrelevant variables removed. Guards
/// and the location structure are untouched.
Cfg slice(const Cfg &cfg);

} // namespace lb
