#include "trussopt/mcts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace trussopt::mcts {

double ucb(double value, std::uint32_t visits, std::uint32_t parent_visits,
           double exploration) {
  if (visits == 0) return std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(parent_visits < 1 ? 1 : parent_visits);
  return value + exploration * std::sqrt(std::log(n) / static_cast<double>(visits));
}

long iteration_budget(int layer, int catalog_size, int width, int depth) {
  const double digits =
      std::ceil(static_cast<double>(depth - layer) * std::log10(width));
  const long base = static_cast<long>(catalog_size) * static_cast<long>(digits);
  return layer == 0 ? 2 * base : base;
}

void write_trace_header(std::ostream& out) {
  out << "round,iteration,sim_depth,path,reward,root_value\n";
}

SearchTree::SearchTree(SimEnv& env, Backprop mode, double exploration)
    : env_(&env), mode_(mode), exploration_(exploration) {
  nodes_.push_back(SearchNode{});
}

void SearchTree::path_of(std::int32_t id, std::vector<int>& out) const {
  out.clear();
  for (std::int32_t n = id; nodes_[static_cast<std::size_t>(n)].parent >= 0;
       n = nodes_[static_cast<std::size_t>(n)].parent)
    out.push_back(nodes_[static_cast<std::size_t>(n)].action);
  std::reverse(out.begin(), out.end());
}

std::int32_t SearchTree::select_child(std::int32_t parent) const {
  const SearchNode& p = nodes_[static_cast<std::size_t>(parent)];
  std::int32_t best = p.children.front();
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::int32_t c : p.children) {
    const SearchNode& child = nodes_[static_cast<std::size_t>(c)];
    const double score =
        ucb(child.value(mode_), child.visits, p.visits, exploration_);
    if (score > best_score) {
      best_score = score;
      best = c;
    }
  }
  return best;
}

void SearchTree::expand(std::int32_t id) {
  SearchNode& n = nodes_[static_cast<std::size_t>(id)];
  const int count = env_->action_count(n.layer);
  n.expanded = true;
  n.children.reserve(static_cast<std::size_t>(count));
  const std::uint16_t child_layer = static_cast<std::uint16_t>(n.layer + 1);
  for (int a = 0; a < count; ++a) {
    SearchNode child;
    child.parent = id;
    child.action = a;
    child.layer = child_layer;
    nodes_.push_back(child);
    nodes_[static_cast<std::size_t>(id)].children.push_back(
        static_cast<std::int32_t>(nodes_.size() - 1));
  }
}

void SearchTree::backpropagate(std::int32_t from, double result) {
  for (std::int32_t n = from;; n = nodes_[static_cast<std::size_t>(n)].parent) {
    SearchNode& node = nodes_[static_cast<std::size_t>(n)];
    node.visits += 1;
    if (result > node.best_value) node.best_value = result;
    node.value_sum += result;
    if (n == root_) break;
  }
}

void SearchTree::run_iterations(long budget, IndexSource& rng,
                                TraceSink* trace) {
  const int g = env_->depth();
  std::vector<int> path;
  path.reserve(static_cast<std::size_t>(g));
  for (long it = 0; it < budget; ++it) {
    // selection: descend by UCB until a leaf (unexpanded or terminal)
    std::int32_t cur = root_;
    while (nodes_[static_cast<std::size_t>(cur)].expanded &&
           nodes_[static_cast<std::size_t>(cur)].layer < g)
      cur = select_child(cur);

    std::int32_t sim = cur;
    TerminalEval ev;
    if (nodes_[static_cast<std::size_t>(cur)].layer == g) {
      // terminal leaf: re-evaluate it
      path_of(cur, path);
      ev = env_->evaluate(path);
    } else {
      expand(cur);
      const auto& ch = nodes_[static_cast<std::size_t>(cur)].children;
      sim = ch[rng.pick(ch.size())];
      path_of(sim, path);
      while (static_cast<int>(path.size()) < g)
        path.push_back(static_cast<int>(
            rng.pick(static_cast<std::size_t>(
                env_->action_count(static_cast<int>(path.size()))))));
      ev = env_->evaluate(path);
    }
    backpropagate(sim, ev.reward);

    if (trace && trace->out) {
      std::ostream& out = *trace->out;
      out << trace->round << ',' << trace->iteration++ << ','
          << nodes_[static_cast<std::size_t>(sim)].layer << ',';
      for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) out << ';';
        out << path[i];
      }
      char buf[64];
      std::snprintf(buf, sizeof buf, ",%.17g,%.17g", ev.reward,
                    nodes_[static_cast<std::size_t>(root_)].value(mode_));
      out << buf << '\n';
    }
  }
}

int SearchTree::descend_best_child() {
  SearchNode& r = nodes_[static_cast<std::size_t>(root_)];
  if (r.layer >= env_->depth())
    throw std::logic_error("descend from a terminal root");
  if (!r.expanded) expand(root_);
  const auto& ch = nodes_[static_cast<std::size_t>(root_)].children;
  const int preferred =
      env_->preferred_choice(nodes_[static_cast<std::size_t>(root_)].layer);
  std::int32_t best = -1;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::int32_t c : ch) {
    const SearchNode& child = nodes_[static_cast<std::size_t>(c)];
    if (child.visits == 0) continue;
    const double v = child.value(mode_);
    if (v > best_value) {
      best_value = v;
      best = c;
    } else if (v == best_value && best >= 0) {
      // exact tie (typically an all-zero layer): stay closest to the
      // round's starting value; break equidistance toward the larger area
      const auto dist = [&](std::int32_t id) {
        return std::abs(nodes_[static_cast<std::size_t>(id)].action -
                        preferred);
      };
      const SearchNode& incumbent = nodes_[static_cast<std::size_t>(best)];
      if (dist(c) < dist(best) ||
          (dist(c) == dist(best) && child.action > incumbent.action))
        best = c;
    }
  }
  if (best < 0) best = ch.front();  // no child visited (degenerate budget)
  root_ = best;
  return nodes_[static_cast<std::size_t>(best)].action;
}

bool SearchTree::root_terminal() const {
  return nodes_[static_cast<std::size_t>(root_)].layer >= env_->depth();
}

std::vector<int> SearchTree::root_prefix() const {
  std::vector<int> out;
  path_of(root_, out);
  return out;
}

std::vector<int> policy_improvement(
    SimEnv& env, const std::function<long(int)>& layer_budget, Backprop mode,
    double exploration, IndexSource& rng, TraceSink* trace) {
  SearchTree tree(env, mode, exploration);
  const int g = env.depth();
  for (int layer = 0; layer < g; ++layer) {
    tree.run_iterations(layer_budget(layer), rng, trace);
    tree.descend_best_child();
  }
  return tree.root_prefix();
}

}  // namespace trussopt::mcts
