#include "loopbound/oracle.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace lb {

namespace {

long long log2floor(long long v) {
  if (v < 1) v = 1;
  long long r = 0;
  while ((1LL << (r + 1)) <= v) ++r;
  return r;
}

// Innermost loop whose body contains every given location, or -1.
int innermost_containing(const LoopNest &nest, std::initializer_list<int> locs) {
  int best = -1, best_depth = 0;
  for (size_t i = 0; i < nest.loops.size(); ++i) {
    bool all = true;
    for (int l : locs)
      if (!nest.loops[i].body.count(l)) all = false;
    if (!all) continue;
    int d = nest.depth((int)i);
    if (d > best_depth) {
      best_depth = d;
      best = (int)i;
    }
  }
  return best;
}

} // namespace

std::vector<std::vector<int>> decompose_cycles(const Cfg &cfg,
                                               const LoopNest &nest,
                                               const std::vector<int> &trace) {
  std::vector<std::vector<int>> out;
  if (trace.empty()) return out;
  std::vector<int> locs{cfg.transitions[trace[0]].src};
  std::vector<int> edges; // edges[j] connects locs[j] -> locs[j+1]
  for (int e : trace) {
    int d = cfg.transitions[e].dst;
    auto it = std::find(locs.begin(), locs.end(), d);
    if (it == locs.end()) {
      edges.push_back(e);
      locs.push_back(d);
      continue;
    }
    size_t i = (size_t)(it - locs.begin());
    std::vector<int> cyc(edges.begin() + i, edges.end());
    cyc.push_back(e);
    std::vector<int> cyc_locs(locs.begin() + i, locs.end());
    // Rotate so the cycle starts at its loop header.
    int loop = -1, depth = 0;
    for (int l : cyc_locs) {
      auto hit = nest.header_to_loop.find(l);
      if (hit == nest.header_to_loop.end()) continue;
      int cand = hit->second;
      bool covers = true;
      for (int cl : cyc_locs)
        if (!nest.loops[cand].body.count(cl)) covers = false;
      if (covers && nest.depth(cand) > depth) {
        depth = nest.depth(cand);
        loop = cand;
      }
    }
    if (loop >= 0) {
      int header = nest.loops[loop].header;
      size_t k = 0;
      while (k < cyc_locs.size() && cyc_locs[k] != header) ++k;
      std::rotate(cyc.begin(), cyc.begin() + k, cyc.end());
    }
    out.push_back(std::move(cyc));
    locs.resize(i + 1);
    edges.resize(i);
  }
  return out;
}

Oracle::Oracle(const Cfg &cfg, const LoopNest &nest, const LossyVass &vass,
               const TransitionSystem &ts, std::map<int, BoundExpr> iv)
    : cfg_(cfg), nest_(nest), vass_(vass), ts_(ts), iv_(std::move(iv)) {
  for (auto &t : cfg.transitions)
    edge_loop_[t.id] = innermost_containing(nest, {t.src, t.dst});
  for (size_t i = 0; i < ts.paths.size(); ++i)
    path_of_[ts.paths[i].trans] = (int)i;
  for (auto &t : ts.transitions)
    for (int p : t.paths) trans_of_path_[p] = t.id;
}

namespace {

// Active-loop stack: (loop index, edges of the unfinished iteration).
using Active = std::vector<std::pair<int, std::vector<int>>>;

struct Counts {
  std::vector<long long> v;
  Counts() = default;
  explicit Counts(size_t n) : v(n, 0) {}
  void max_with(const Counts &o) {
    for (size_t i = 0; i < v.size(); ++i) v[i] = std::max(v[i], o.v[i]);
  }
  Counts plus(const Counts &o) const {
    Counts r = *this;
    for (size_t i = 0; i < v.size(); ++i) r.v[i] += o.v[i];
    return r;
  }
};

} // namespace

struct SimState {
  const Oracle &o;
  const Valuation &params;
  long long cap;
  size_t npaths, ntrans;
  std::map<int, size_t> trans_slot;
  bool cap_hit = false, divergent = false;

  using Key = std::tuple<int, std::vector<long long>, Active>;
  std::map<Key, std::optional<Counts>> memo;
  std::set<Key> onstack;

  explicit SimState(const Oracle &oracle, const Valuation &p, long long c)
      : o(oracle), params(p), cap(c) {
    npaths = o.ts_.paths.size();
    for (auto &t : o.ts_.transitions)
      trans_slot.emplace(t.id, npaths + trans_slot.size());
    ntrans = trans_slot.size();
  }
  size_t width() const { return npaths + ntrans + 2; }
  size_t total_slot() const { return npaths + ntrans; }
  size_t steps_slot() const { return npaths + ntrans + 1; }

  // Applies edge e to the active stack; returns the completed path
  // index or -1.
  int advance(Active &a, int e) const {
    const Transition &t = o.cfg_.transitions[e];
    // Close iterations of loops the edge leaves.
    a.erase(std::remove_if(a.begin(), a.end(),
                           [&](auto &lvl) {
                             return !o.nest_.loops[lvl.first].body.count(
                                 t.dst);
                           }),
            a.end());
    int L = o.edge_loop_.at(e);
    if (L < 0) return -1;
    auto it = std::find_if(a.begin(), a.end(),
                           [&](auto &lvl) { return lvl.first == L; });
    if (it == a.end()) {
      // Keep the stack ordered outermost-first.
      auto pos = std::find_if(a.begin(), a.end(), [&](auto &lvl) {
        return o.nest_.depth(lvl.first) > o.nest_.depth(L);
      });
      it = a.insert(pos, {L, {}});
    }
    it->second.push_back(e);
    if (t.dst != o.nest_.loops[L].header) return -1;
    auto pit = o.path_of_.find(it->second);
    it->second.clear();
    return pit == o.path_of_.end() ? -1 : pit->second;
  }

  // Per-quantity maxima over all suffixes that reach the end location;
  // nullopt when no continuation completes (stuck, diverging, or
  // beyond the step cap).
  std::optional<Counts> explore(int loc, const std::vector<long long> &vals,
                                const Active &active, long long depth) {
    if (loc == o.cfg_.end) return Counts(width());
    if (depth > cap) {
      cap_hit = true;
      return std::nullopt;
    }
    Key key{loc, vals, active};
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    if (onstack.count(key)) {
      divergent = true;
      return std::nullopt;
    }
    onstack.insert(key);
    Counts best(width());
    bool any = false;
    for (int e : o.cfg_.transitions_from(loc)) {
      std::vector<long long> nv = vals;
      bool enabled = true;
      for (auto &[nid, sc] : o.vass_.edges[e]) {
        nv[nid] += sc.eval(params);
        if (nv[nid] < 0) enabled = false;
      }
      if (!enabled) continue;
      Active a = active;
      int done = advance(a, e);
      Counts inc(width());
      inc.v[steps_slot()] = 1;
      if (done >= 0) {
        inc.v[done] = 1;
        auto ts_it = o.trans_of_path_.find(done);
        if (ts_it != o.trans_of_path_.end())
          inc.v[trans_slot.at(ts_it->second)] = 1;
        inc.v[total_slot()] = 1;
      }
      auto sub = explore(o.cfg_.transitions[e].dst, nv, a, depth + 1);
      if (!sub) continue;
      best.max_with(inc.plus(*sub));
      any = true;
    }
    onstack.erase(key);
    std::optional<Counts> result;
    if (any) result = std::move(best);
    memo.emplace(std::move(key), result);
    return result;
  }
};

namespace {

std::vector<long long> begin_values(const LossyVass &vass,
                                    const std::map<int, BoundExpr> &iv,
                                    const Valuation &params) {
  // Locals are 0 before their first assignment; norms clamp at 0. Log
  // norms take their initial-value expression because entry-chain
  // assignments carry no log delta.
  std::vector<long long> v;
  for (auto &n : vass.norms) {
    if (n.kind == Norm::Kind::Log) {
      auto it = iv.find(n.id);
      if (it != iv.end()) {
        v.push_back(std::max(it->second.eval(params), 0LL));
      } else {
        auto pit = params.find(n.log_var);
        v.push_back(log2floor(pit == params.end() ? 0 : pit->second));
      }
    } else {
      v.push_back(std::max(n.base.eval(params), 0LL));
    }
  }
  return v;
}

TraceStats to_stats(const SimState &st, const Counts &c) {
  TraceStats out;
  for (size_t i = 0; i < st.npaths; ++i) out.path_max[(int)i] = c.v[i];
  for (auto &[tid, slot] : st.trans_slot) out.trans_max[tid] = c.v[slot];
  out.total_max = c.v[st.total_slot()];
  out.max_steps = c.v[st.steps_slot()];
  out.cap_hit = st.cap_hit;
  out.divergent = st.divergent;
  return out;
}

} // namespace

TraceStats Oracle::simulate(const Valuation &params, long long step_cap) const {
  SimState st(*this, params, step_cap);
  auto best = st.explore(cfg_.begin, begin_values(vass_, iv_, params),
                         Active{}, 0);
  TraceStats out = to_stats(st, best ? *best : Counts(st.width()));
  out.completed = best.has_value();
  return out;
}

TraceStats Oracle::lossy_run(const Valuation &params, std::mt19937 &rng,
                             long long step_cap) const {
  SimState st(*this, params, step_cap); // reused for slot layout only
  Counts acc(st.width());
  std::vector<long long> vals = begin_values(vass_, iv_, params);
  Active active;
  int loc = cfg_.begin;
  for (long long step = 0; step < step_cap && loc != cfg_.end; ++step) {
    std::vector<std::pair<int, std::vector<long long>>> options;
    for (int e : cfg_.transitions_from(loc)) {
      std::vector<long long> nv = vals;
      bool enabled = true;
      for (auto &[nid, sc] : vass_.edges[e]) {
        nv[nid] += sc.eval(params);
        if (nv[nid] < 0) enabled = false;
      }
      if (enabled) options.emplace_back(e, std::move(nv));
    }
    if (options.empty()) break;
    auto &[e, nv] = options[std::uniform_int_distribution<size_t>(
        0, options.size() - 1)(rng)];
    // Lossy: each component may drop anywhere down to 0.
    for (auto &x : nv)
      x = std::uniform_int_distribution<long long>(0, x)(rng);
    vals = nv;
    int done = st.advance(active, e);
    acc.v[st.steps_slot()] += 1;
    if (done >= 0) {
      acc.v[done] += 1;
      auto it = trans_of_path_.find(done);
      if (it != trans_of_path_.end()) acc.v[st.trans_slot.at(it->second)] += 1;
      acc.v[st.total_slot()] += 1;
    }
    loc = cfg_.transitions[e].dst;
  }
  TraceStats out = to_stats(st, acc);
  out.completed = loc == cfg_.end;
  return out;
}

SoundnessReport check_soundness(
    const Oracle &oracle, const Cfg &cfg,
    const std::map<int, std::optional<BoundExpr>> &per_trans,
    const std::optional<BoundExpr> &total, long long grid_max,
    long long step_cap, long long corrupt) {
  SoundnessReport rep;
  std::vector<Valuation> grid{{}};
  for (auto &p : cfg.params) {
    std::vector<Valuation> next;
    for (auto &g : grid)
      for (long long v = 0; v <= grid_max; ++v) {
        Valuation g2 = g;
        g2[p] = v;
        next.push_back(std::move(g2));
      }
    grid = std::move(next);
  }
  auto point_str = [&](const Valuation &g) {
    std::string s;
    for (auto &[k, v] : g) s += (s.empty() ? "" : ",") + k + "=" +
                               std::to_string(v);
    return s.empty() ? std::string("-") : s;
  };
  for (auto &g : grid) {
    TraceStats st = oracle.simulate(g, step_cap);
    std::string pt = point_str(g);
    if (!st.completed || st.cap_hit || st.divergent) {
      rep.ok = false;
      rep.violations.push_back(
          "[" + pt + "] trace did not complete (" +
          (st.divergent ? "diverged"
                        : st.cap_hit ? "cap exceeded" : "stuck") +
          ")");
      continue;
    }
    for (auto &[tid, b] : per_trans) {
      if (!b) continue;
      long long bv = b->eval(g) - corrupt;
      long long obs = st.trans_max.count(tid) ? st.trans_max.at(tid) : 0;
      std::ostringstream line;
      line << "[" << pt << "] t" << (tid + 1) << ": observed " << obs
           << " <= bound(" << bv << ")";
      rep.lines.push_back(line.str());
      if (obs > bv) {
        rep.ok = false;
        rep.violations.push_back(line.str() + "  VIOLATION");
      }
    }
    if (total) {
      long long bv = total->eval(g) - corrupt;
      std::ostringstream line;
      line << "[" << pt << "] total: observed " << st.total_max
           << " <= bound(" << bv << ")";
      rep.lines.push_back(line.str());
      if (st.total_max > bv) {
        rep.ok = false;
        rep.violations.push_back(line.str() + "  VIOLATION");
      }
    }
  }
  return rep;
}

} // namespace lb
