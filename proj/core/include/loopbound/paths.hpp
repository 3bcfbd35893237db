// Loop-path enumeration and symbolic contraction. A loop path runs from
// a loop header back to itself without iterating nested loops; crossing
// a nested loop havocs the variables that loop can modify.
#pragma once

#include "loopbound/loops.hpp"

namespace lb {

struct PathError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LoopPath {
  int loop = -1;           // index into LoopNest::loops
  std::vector<int> trans;  // transition ids; last one is a back edge
};

/// A loop path collapsed into one guarded simultaneous update, both
/// expressed over the variable values at the path entry (the header).
/// Fresh havoc variables (prefix '%') stand for values produced by
/// nested loops or by non-linear chains the contraction cannot track.
struct ContractedPath {
  std::vector<Constraint> guard;
  UpdateMap update;
  std::set<Var> havoc;
};

inline bool is_havoc_var(const Var &v) { return !v.empty() && v[0] == '%'; }

/// Variables written by any transition lying inside the loop.
std::set<Var> modified_in_loop(const Cfg &cfg, const LoopNest &nest, int loop);

/// All loop paths of every loop. Throws PathError above `cap` paths.
std::vector<LoopPath> enumerate_paths(const Cfg &cfg, const LoopNest &nest,
                                      size_t cap = 5000);

/// With havoc_inner (the default) crossing a nested loop header havocs
/// everything that loop can write, which keeps the guards sound for
/// invariant reasoning. Without it the composition is purely syntactic
/// over the path's own transitions — only safe for generating norm
/// candidates, never for justifying facts.
ContractedPath contract(const Cfg &cfg, const LoopNest &nest,
                        const LoopPath &path, bool havoc_inner = true);

/// Symbolic state immediately before each transition of the path
/// (sound, inner crossings havocked): accumulated guard and the
/// substitution mapping current values to path-entry values.
struct PrefixState {
  std::vector<Constraint> guard;
  UpdateMap sigma;
};

std::vector<PrefixState> contract_prefixes(const Cfg &cfg,
                                           const LoopNest &nest,
                                           const LoopPath &path);

} // namespace lb
