#include "loopbound/ranking.hpp"

#include <algorithm>
#include <sstream>

namespace lb {

std::variant<LexRanking, RankFailure> rank(const TransitionSystem &ts) {
  std::vector<int> remaining;
  for (auto &t : ts.transitions) remaining.push_back(t.id);
  LexRanking lex;

  while (!remaining.empty()) {
    // Eligible pair: t certainly decreases x and every other remaining
    // transition certainly does not increase x.
    int best_t = -1, best_n = -1;
    long long best_mag = 0;
    for (int tid : remaining) {
      const auto &t = ts.transitions[tid];
      for (auto &n : ts.norms) {
        const Delta &d = t.deltas.at(n.id);
        if (!d.cert_negative()) continue;
        bool ok = true;
        for (int o : remaining) {
          if (o == tid) continue;
          if (!ts.transitions[o].deltas.at(n.id).cert_nonpos()) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
        long long mag = d.dec_magnitude();
        if (best_t == -1 || tid < best_t ||
            (tid == best_t && (mag > best_mag ||
                               (mag == best_mag && n.id < best_n)))) {
          best_t = tid;
          best_n = n.id;
          best_mag = mag;
        }
      }
      if (best_t == tid) break; // lower ids cannot appear later
    }
    if (best_t == -1) {
      RankFailure f;
      f.remaining = remaining;
      // A transition with no certainly-decreasing norm at all can never
      // be removed; otherwise the decreases block each other.
      int hopeless = -1;
      for (int tid : remaining) {
        bool any = false;
        for (auto &n : ts.norms)
          if (ts.transitions[tid].deltas.at(n.id).cert_negative()) any = true;
        if (!any) {
          hopeless = tid;
          break;
        }
      }
      if (hopeless >= 0) {
        f.kind = RankFailureKind::NoLocalRankingFunction;
        f.message = "no local ranking function for " +
                    ts.transitions[hopeless].name;
      } else {
        f.kind = RankFailureKind::CyclicDependency;
        f.message = "cyclic dependency between local ranking functions";
      }
      return f;
    }
    lex.comps.push_back(
        {best_t, best_n, ts.transitions[best_t].deltas.at(best_n)});
    remaining.erase(std::find(remaining.begin(), remaining.end(), best_t));
  }
  return lex;
}

std::string LexRanking::dump(const TransitionSystem &ts) const {
  std::ostringstream os;
  for (size_t k = 0; k < comps.size(); ++k) {
    const LexComponent &c = comps[k];
    std::string norm;
    for (auto &n : ts.norms)
      if (n.id == c.norm) norm = n.str();
    os << (k + 1) << ": t" << (c.trans + 1) << " ranked by " << norm
       << " (delta " << c.delta.str() << ")\n";
  }
  return os.str();
}

} // namespace lb
