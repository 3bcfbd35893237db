#include "loopbound/loops.hpp"

#include <algorithm>
#include <functional>

namespace lb {

int LoopNest::innermost_at(int loc) const {
  int best = -1, best_size = -1;
  for (size_t i = 0; i < loops.size(); ++i) {
    if (!loops[i].body.count(loc)) continue;
    int sz = (int)loops[i].body.size();
    if (best < 0 || sz < best_size) {
      best = (int)i;
      best_size = sz;
    }
  }
  return best;
}

int LoopNest::depth(int loop) const {
  int d = 0;
  for (int i = loop; i >= 0; i = loops[i].parent) ++d;
  return d;
}

static std::vector<int> reverse_postorder(const Cfg &cfg) {
  std::vector<bool> seen(cfg.num_locs(), false);
  std::vector<int> post;
  std::function<void(int)> dfs = [&](int u) {
    seen[u] = true;
    for (int v : cfg.successors(u))
      if (!seen[v]) dfs(v);
    post.push_back(u);
  };
  dfs(cfg.begin);
  std::reverse(post.begin(), post.end());
  return post;
}

std::vector<int> immediate_dominators(const Cfg &cfg) {
  // Cooper/Harvey/Kennedy iterative algorithm over reverse postorder.
  auto rpo = reverse_postorder(cfg);
  std::vector<int> rpo_index(cfg.num_locs(), -1);
  for (size_t i = 0; i < rpo.size(); ++i) rpo_index[rpo[i]] = (int)i;

  std::vector<std::vector<int>> preds(cfg.num_locs());
  for (auto &t : cfg.transitions)
    if (rpo_index[t.src] >= 0) preds[t.dst].push_back(t.src);

  std::vector<int> idom(cfg.num_locs(), -1);
  idom[cfg.begin] = cfg.begin;

  auto intersect = [&](int a, int b) {
    while (a != b) {
      while (rpo_index[a] > rpo_index[b]) a = idom[a];
      while (rpo_index[b] > rpo_index[a]) b = idom[b];
    }
    return a;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (int u : rpo) {
      if (u == cfg.begin) continue;
      int new_idom = -1;
      for (int p : preds[u]) {
        if (idom[p] < 0) continue;
        new_idom = new_idom < 0 ? p : intersect(new_idom, p);
      }
      if (new_idom >= 0 && idom[u] != new_idom) {
        idom[u] = new_idom;
        changed = true;
      }
    }
  }
  return idom;
}

bool dominates(const std::vector<int> &idom, int a, int b) {
  if (idom[b] < 0) return false;
  int u = b;
  for (;;) {
    if (u == a) return true;
    if (idom[u] == u) return false;
    u = idom[u];
  }
}

LoopNest find_loops(const Cfg &cfg) {
  auto idom = immediate_dominators(cfg);

  std::vector<std::vector<int>> pred_trans(cfg.num_locs());
  for (auto &t : cfg.transitions) pred_trans[t.dst].push_back(t.id);

  // Retreating edges: dst dominates src => back edge; otherwise the
  // graph is irreducible. Retreating = dst reaches src in a DFS sense;
  // equivalently here, any edge whose target dominates its source is a
  // back edge, and we must check the remaining cycles.
  LoopNest nest;
  std::map<int, Loop> by_header;
  for (auto &t : cfg.transitions) {
    if (idom[t.src] < 0) continue; // unreachable
    if (!dominates(idom, t.dst, t.src)) continue;
    Loop &l = by_header[t.dst];
    l.header = t.dst;
    l.back_edges.push_back(t.id);
    // Natural loop body: backward reachability from src, stopping at
    // the header.
    l.body.insert(t.dst);
    std::vector<int> stack;
    if (!l.body.count(t.src)) {
      l.body.insert(t.src);
      stack.push_back(t.src);
    }
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int tid : pred_trans[u]) {
        int p = cfg.transitions[tid].src;
        if (idom[p] < 0 || l.body.count(p)) continue;
        l.body.insert(p);
        stack.push_back(p);
      }
    }
  }

  // Irreducibility: a cycle whose edges include no back edge.
  {
    std::set<int> back;
    for (auto &[h, l] : by_header)
      for (int b : l.back_edges) back.insert(b);
    // DFS over forward (non-back) edges; a cycle there is irreducible.
    std::vector<int> state(cfg.num_locs(), 0); // 0 new, 1 open, 2 done
    std::function<void(int)> dfs = [&](int u) {
      state[u] = 1;
      for (auto &t : cfg.transitions) {
        if (t.src != u || back.count(t.id)) continue;
        if (state[t.dst] == 1)
          throw IrreducibleError("irreducible control flow at location " +
                                 cfg.loc_name(t.dst));
        if (state[t.dst] == 0) dfs(t.dst);
      }
      state[u] = 2;
    };
    dfs(cfg.begin);
  }

  // Order outer-before-inner (larger body first), then nest.
  std::vector<Loop> ordered;
  for (auto &[h, l] : by_header) ordered.push_back(l);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const Loop &a, const Loop &b) {
                     return a.body.size() > b.body.size();
                   });
  nest.loops = std::move(ordered);
  for (size_t i = 0; i < nest.loops.size(); ++i)
    nest.header_to_loop[nest.loops[i].header] = (int)i;
  for (size_t i = 0; i < nest.loops.size(); ++i) {
    // Parent: smallest strictly containing loop.
    int parent = -1;
    size_t parent_size = 0;
    for (size_t j = 0; j < nest.loops.size(); ++j) {
      if (i == j) continue;
      const Loop &cand = nest.loops[j];
      if (cand.body.size() <= nest.loops[i].body.size()) continue;
      if (!cand.body.count(nest.loops[i].header)) continue;
      if (parent < 0 || cand.body.size() < parent_size) {
        parent = (int)j;
        parent_size = cand.body.size();
      }
    }
    nest.loops[i].parent = parent;
    if (parent >= 0)
      nest.loops[parent].children.push_back((int)i);
    else
      nest.top.push_back((int)i);
  }
  return nest;
}

} // namespace lb
