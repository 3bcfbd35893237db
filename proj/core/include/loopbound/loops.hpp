// Dominator analysis, natural loop detection and the loop-nest tree.
#pragma once

#include <map>
#include <stdexcept>

#include "loopbound/cfg.hpp"

namespace lb {

struct IrreducibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Loop {
  int header = -1;
  std::set<int> body;           // locations, header included
  std::vector<int> back_edges;  // transition ids into the header
  int parent = -1;              // index into LoopNest::loops, -1 = top
  std::vector<int> children;    // indices into LoopNest::loops
};

struct LoopNest {
  std::vector<Loop> loops;          // outer loops before their children
  std::vector<int> top;             // indices of outermost loops
  std::map<int, int> header_to_loop;

  bool in_some_loop(int loc) const {
    for (auto &l : loops)
      if (l.body.count(loc)) return true;
    return false;
  }

  /// Innermost loop containing `loc`, or -1.
  int innermost_at(int loc) const;

  /// Depth of the loop (outermost = 1).
  int depth(int loop) const;
};

/// Immediate dominators, indexed by location; begin maps to itself.
/// Unreachable locations map to -1.
std::vector<int> immediate_dominators(const Cfg &cfg);

/// True when `a` dominates `b` under the given idom tree.
bool dominates(const std::vector<int> &idom, int a, int b);

/// Detects natural loops and nests them. Throws IrreducibleError when a
/// retreating edge targets a location that does not dominate its source.
LoopNest find_loops(const Cfg &cfg);

} // namespace lb
