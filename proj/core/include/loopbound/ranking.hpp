// Lexicographic ranking generation: greedily peel off transitions that
// certainly decrease a norm no remaining transition can increase.
#pragma once

#include <variant>

#include "loopbound/cfa.hpp"

namespace lb {

struct LexComponent {
  int trans = -1; // AbstractTransition id
  int norm = -1;  // norm id ranking it
  Delta delta;    // its certain decrease on that norm
};

struct LexRanking {
  std::vector<LexComponent> comps; // lexicographic order
  std::string dump(const TransitionSystem &ts) const;
};

enum class RankFailureKind { NoLocalRankingFunction, CyclicDependency };

struct RankFailure {
  RankFailureKind kind;
  std::vector<int> remaining; // unremovable transition ids
  std::string message;
};

std::variant<LexRanking, RankFailure> rank(const TransitionSystem &ts);

} // namespace lb
