#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "trussopt/rng.hpp"
#include "trussopt/search_env.hpp"

namespace trussopt::mcts {

enum class Backprop { best, average };

// Upper confidence bound; unvisited nodes score +infinity so every child is
// tried once before any child is revisited.
double ucb(double value, std::uint32_t visits, std::uint32_t parent_visits,
           double exploration);

// Iteration cap for the policy-improvement step at a given layer:
//   layer 0:  2b * ceil(log10(width^depth))
//   layer l:   b * ceil(log10(width^(depth-l)))
// `width` is the nominal window width of the round (it may exceed the
// catalog size b; budgets use the nominal value).
long iteration_budget(int layer, int catalog_size, int width, int depth);

struct SearchNode {
  std::int32_t parent = -1;
  std::int32_t action = -1;   // choice index leading here from the parent
  std::uint16_t layer = 0;
  bool expanded = false;
  std::uint32_t visits = 0;   // backpropagations through this node
  double best_value = 0.0;    // running max of simulation results
  double value_sum = 0.0;     // running sum, for average-reward mode
  std::vector<std::int32_t> children;

  double value(Backprop mode) const {
    if (mode == Backprop::best) return best_value;
    return visits ? value_sum / static_cast<double>(visits) : 0.0;
  }
};

// Per-iteration CSV log: round, iteration, depth of the simulated node, the
// full terminal action path, the simulation result, and the current root's
// value after backpropagation. Deterministic byte-for-byte under a fixed
// seed (no timestamps).
struct TraceSink {
  std::ostream* out = nullptr;
  int round = 0;
  long iteration = 0;
};

void write_trace_header(std::ostream& out);

// One search tree per round. Selection descends by UCB; expansion adds all
// children of a non-terminal leaf with zeroed statistics; simulation rolls
// out uniformly at random from a randomly chosen new child; backpropagation
// applies the best-reward (or average) update from the simulated node up to
// the current root. descend_best_child() re-roots at the child with the
// largest value estimate, keeping its subtree statistics.
class SearchTree {
 public:
  SearchTree(SimEnv& env, Backprop mode, double exploration);

  void run_iterations(long budget, IndexSource& rng,
                      TraceSink* trace = nullptr);

  // Re-roots at the best child (ties: lowest action index). Returns the
  // action taken. The root must not be terminal.
  int descend_best_child();

  bool root_terminal() const;
  std::vector<int> root_prefix() const;  // actions from layer 0 to the root

  std::int32_t root_id() const { return root_; }
  const SearchNode& node(std::int32_t id) const {
    return nodes_[static_cast<std::size_t>(id)];
  }
  const SearchNode& root() const { return node(root_); }
  std::size_t size() const { return nodes_.size(); }

 private:
  std::int32_t select_child(std::int32_t parent) const;
  void expand(std::int32_t id);
  void backpropagate(std::int32_t from, double result);
  void path_of(std::int32_t id, std::vector<int>& out) const;

  SimEnv* env_;
  Backprop mode_;
  double exploration_;
  std::int32_t root_ = 0;
  std::vector<SearchNode> nodes_;
};

// The full per-round walk: run the layer budget, descend, repeat until the
// root is terminal. Returns the terminal action path (one choice per group).
std::vector<int> policy_improvement(
    SimEnv& env, const std::function<long(int)>& layer_budget, Backprop mode,
    double exploration, IndexSource& rng, TraceSink* trace = nullptr);

}  // namespace trussopt::mcts
