#include "branched/plan_regularizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace branched {
namespace {

double zero_threshold(const TransportPlan& plan) { return kZeroFlow * plan.total_mass(); }

std::vector<std::vector<NodeId>> out_support(const TransportPlan& plan, double threshold) {
  std::vector<std::vector<NodeId>> out(plan.layout().size());
  for (const auto& [arc, g] : plan.entries())
    if (g > threshold) out[arc.first].push_back(arc.second);
  return out;
}

// First directed cycle found by DFS from the lowest-numbered node, as a
// closed node sequence (front == back). Self-loops come back as {i, i}.
std::optional<std::vector<NodeId>> find_cycle(const TransportPlan& plan, double threshold) {
  const auto out = out_support(plan, threshold);
  const std::size_t n = out.size();
  enum : char { White, Grey, Black };
  std::vector<char> color(n, White);
  std::vector<NodeId> stack;
  std::vector<std::size_t> cursor(n, 0);
  for (NodeId root = 0; root < n; ++root) {
    if (color[root] != White) continue;
    stack.push_back(root);
    color[root] = Grey;
    while (!stack.empty()) {
      const NodeId u = stack.back();
      if (cursor[u] < out[u].size()) {
        const NodeId v = out[u][cursor[u]++];
        if (color[v] == Grey) {
          auto start = std::find(stack.begin(), stack.end(), v);
          std::vector<NodeId> cycle(start, stack.end());
          cycle.push_back(v);
          return cycle;
        }
        if (color[v] == White) {
          color[v] = Grey;
          stack.push_back(v);
        }
      } else {
        color[u] = Black;
        stack.pop_back();
      }
    }
  }
  return std::nullopt;
}

struct PathPair {
  std::vector<NodeId> first;
  std::vector<NodeId> second;
};

// Two distinct positive paths from `start` with common endpoints and
// disjoint interiors, if any exist. The support must be acyclic.
std::optional<PathPair> find_parallel_paths(const std::vector<std::vector<NodeId>>& out,
                                            NodeId start) {
  const std::size_t n = out.size();
  std::vector<char> reached(n, 0);
  std::vector<NodeId> queue{start};
  reached[start] = 1;
  for (std::size_t k = 0; k < queue.size(); ++k)
    for (NodeId v : out[queue[k]])
      if (!reached[v]) {
        reached[v] = 1;
        queue.push_back(v);
      }

  std::vector<std::size_t> indegree(n, 0);
  std::vector<std::vector<NodeId>> in(n);
  for (NodeId u : queue)
    for (NodeId v : out[u]) {
      ++indegree[v];
      in[v].push_back(u);
    }

  // Kahn order; the first node with two incoming arcs closes the pair.
  std::vector<std::size_t> remaining = indegree;
  std::vector<NodeId> ready{start};
  std::vector<NodeId> parent(n, n);
  std::vector<std::size_t> depth(n, 0);
  while (!ready.empty()) {
    std::sort(ready.begin(), ready.end(), std::greater<>());
    const NodeId u = ready.back();
    ready.pop_back();
    if (indegree[u] >= 2) {
      std::vector<NodeId> preds = in[u];
      std::sort(preds.begin(), preds.end());
      NodeId a = preds[0];
      NodeId b = preds[1];
      std::vector<NodeId> pa{u, a};
      std::vector<NodeId> pb{u, b};
      while (a != b) {
        if (depth[a] >= depth[b]) {
          a = parent[a];
          pa.push_back(a);
        } else {
          b = parent[b];
          pb.push_back(b);
        }
      }
      // Both lists now end at the common ancestor.
      std::reverse(pa.begin(), pa.end());
      std::reverse(pb.begin(), pb.end());
      return PathPair{std::move(pa), std::move(pb)};
    }
    for (NodeId v : out[u]) {
      if (indegree[v] == 1) {
        parent[v] = u;
        depth[v] = depth[u] + 1;
      }
      if (--remaining[v] == 0) ready.push_back(v);
    }
  }
  return std::nullopt;
}

double path_cost(const std::vector<NodeId>& path, const Embedding& pos, double q) {
  double s = 0.0;
  for (std::size_t l = 0; l + 1 < path.size(); ++l) s += arc_cost(pos, path[l], path[l + 1], q);
  return s;
}

// Subtracts the bottleneck flow of `path` from each of its arcs, zeroing the
// bottleneck exactly, and returns the amount removed.
double drain_bottleneck(TransportPlan& plan, const std::vector<NodeId>& path) {
  std::size_t arg = 0;
  double delta = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l + 1 < path.size(); ++l) {
    const double g = plan(path[l], path[l + 1]);
    if (g < delta) {
      delta = g;
      arg = l;
    }
  }
  for (std::size_t l = 0; l + 1 < path.size(); ++l) {
    if (l == arg) {
      plan.set(path[l], path[l + 1], 0.0);
    } else {
      plan.set(path[l], path[l + 1], std::max(0.0, plan(path[l], path[l + 1]) - delta));
    }
  }
  return delta;
}

}  // namespace

TransportPlan cancel_cycles(TransportPlan plan) {
  const double threshold = zero_threshold(plan);
  while (auto cycle = find_cycle(plan, threshold)) drain_bottleneck(plan, *cycle);
  return plan;
}

TransportPlan merge_parallel_paths(TransportPlan plan, const Embedding& pos, double q) {
  const double threshold = zero_threshold(plan);
  if (find_cycle(plan, threshold))
    throw std::invalid_argument("merge_parallel_paths requires an acyclic plan");
  // Rerouting only ever removes support arcs, so a node already scanned
  // clean stays clean and one pass over start nodes reaches the fixed point.
  for (NodeId s = 0; s < plan.layout().size(); ++s) {
    for (;;) {
      const auto out = out_support(plan, threshold);
      auto pair = find_parallel_paths(out, s);
      if (!pair) break;
      const bool first_dearer = path_cost(pair->first, pos, q) > path_cost(pair->second, pos, q);
      const auto& dear = first_dearer ? pair->first : pair->second;
      const auto& cheap = first_dearer ? pair->second : pair->first;
      const double delta = drain_bottleneck(plan, dear);
      for (std::size_t l = 0; l + 1 < cheap.size(); ++l) plan.add(cheap[l], cheap[l + 1], delta);
    }
  }
  return plan;
}

TransportPlan regularize(TransportPlan plan, const Embedding& pos, double q) {
  return merge_parallel_paths(cancel_cycles(std::move(plan)), pos, q);
}

RegularityCheck is_regular(const TransportPlan& plan) {
  RegularityCheck check;
  const double threshold = zero_threshold(plan);
  for (const auto& [arc, g] : plan.entries()) {
    if (arc.first == arc.second && g > threshold) {
      check.regular = false;
      check.kind = Irregularity::SelfLoop;
      check.first = {arc.first, arc.first};
      return check;
    }
  }
  if (auto cycle = find_cycle(plan, threshold)) {
    check.regular = false;
    check.kind = Irregularity::Cycle;
    check.first = std::move(*cycle);
    return check;
  }
  const auto out = out_support(plan, threshold);
  for (NodeId s = 0; s < plan.layout().size(); ++s) {
    if (auto pair = find_parallel_paths(out, s)) {
      check.regular = false;
      check.kind = Irregularity::ParallelPaths;
      check.first = std::move(pair->first);
      check.second = std::move(pair->second);
      return check;
    }
  }
  return check;
}

std::vector<Chain> maximal_chains(const TransportPlan& plan) {
  if (!is_regular(plan)) throw std::invalid_argument("maximal_chains requires a regular plan");
  const double threshold = zero_threshold(plan);
  const NodeLayout& l = plan.layout();
  std::vector<std::vector<NodeId>> out(l.size());
  std::vector<std::size_t> indegree(l.size(), 0);
  for (const auto& [arc, g] : plan.entries()) {
    if (g <= threshold) continue;
    out[arc.first].push_back(arc.second);
    ++indegree[arc.second];
  }
  auto interior = [&](NodeId v) {
    return l.role(v) == NodeRole::Free && indegree[v] == 1 && out[v].size() == 1;
  };

  std::vector<Chain> chains;
  for (NodeId u = 0; u < l.size(); ++u) {
    if (interior(u)) continue;
    for (NodeId v : out[u]) {
      Chain chain;
      chain.nodes = {u, v};
      chain.flow = plan(u, v);
      while (interior(chain.nodes.back())) {
        const NodeId a = chain.nodes.back();
        const NodeId b = out[a].front();
        const double g = plan(a, b);
        if (std::abs(g - chain.flow) > 1e-9 * std::max(chain.flow, g)) {
          std::ostringstream msg;
          msg << "chain flow changes at node " << a << ": " << chain.flow << " vs " << g;
          throw std::invalid_argument(msg.str());
        }
        chain.nodes.push_back(b);
      }
      chains.push_back(std::move(chain));
    }
  }
  return chains;
}

}  // namespace branched
