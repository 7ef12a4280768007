#pragma once

#include <span>

namespace trussopt {

struct TerminalEval {
  double reward = 0.0;
  double weight = 0.0;
  bool feasible = false;
};

// What the tree search needs from the problem: a fixed depth, a per-layer
// action count, and a terminal evaluator. The production environment wraps
// the truss MDP; tests plug in scripted toys.
class SimEnv {
 public:
  virtual ~SimEnv() = default;
  virtual int depth() const = 0;
  virtual int action_count(int layer) const = 0;
  virtual TerminalEval evaluate(std::span<const int> choices) = 0;

  // Choice the greedy descent falls back to when child values tie exactly
  // (in particular when no simulation below the layer scored above zero).
  // The truss environment returns the position of the round's starting
  // value inside the layer's candidate window.
  virtual int preferred_choice(int /*layer*/) const { return 0; }
};

}  // namespace trussopt
