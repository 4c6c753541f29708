#include "network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace branched::detail {

NetworkSimplex::NetworkSimplex(int nodes, std::vector<FlowArc> arcs,
                               std::vector<std::int64_t> supply)
    : nodes_(nodes), root_(nodes), original_arcs_(arcs.size()) {
  const std::size_t total = arcs.size() + static_cast<std::size_t>(nodes);
  tail_.reserve(total);
  head_.reserve(total);
  cost_.reserve(total);

  double max_cost = 0.0;
  for (const FlowArc& a : arcs) {
    tail_.push_back(a.tail);
    head_.push_back(a.head);
    cost_.push_back(a.cost);
    max_cost = std::max(max_cost, a.cost);
  }
  // Any simple path is cheaper than one artificial arc.
  const double artificial = (static_cast<double>(nodes) + 1.0) * std::max(max_cost, 1.0);
  epsilon_ = 64.0 * std::numeric_limits<double>::epsilon() * artificial;

  flow_.assign(total, 0);
  in_tree_.assign(total, 0);
  for (int v = 0; v < nodes; ++v) {
    const std::size_t arc = original_arcs_ + static_cast<std::size_t>(v);
    if (supply[v] >= 0) {
      tail_.push_back(v);
      head_.push_back(root_);
      flow_[arc] = supply[v];
    } else {
      tail_.push_back(root_);
      head_.push_back(v);
      flow_[arc] = -supply[v];
    }
    cost_.push_back(artificial);
    in_tree_[arc] = 1;
  }
  rebuild_tree();
}

void NetworkSimplex::rebuild_tree() {
  const int count = nodes_ + 1;
  std::vector<std::vector<int>> adjacent(count);
  for (std::size_t a = 0; a < tail_.size(); ++a) {
    if (!in_tree_[a]) continue;
    adjacent[tail_[a]].push_back(static_cast<int>(a));
    adjacent[head_[a]].push_back(static_cast<int>(a));
  }
  parent_.assign(count, -1);
  pred_arc_.assign(count, -1);
  pred_up_.assign(count, 0);
  depth_.assign(count, 0);
  potential_.assign(count, 0.0);
  bfs_order_.clear();
  bfs_order_.push_back(root_);
  std::vector<char> seen(count, 0);
  seen[root_] = 1;
  for (std::size_t k = 0; k < bfs_order_.size(); ++k) {
    const int u = bfs_order_[k];
    for (int a : adjacent[u]) {
      const int v = tail_[a] == u ? head_[a] : tail_[a];
      if (seen[v]) continue;
      seen[v] = 1;
      parent_[v] = u;
      pred_arc_[v] = a;
      depth_[v] = depth_[u] + 1;
      if (tail_[a] == v) {
        pred_up_[v] = 1;
        potential_[v] = potential_[u] - cost_[a];
      } else {
        potential_[v] = potential_[u] + cost_[a];
      }
      bfs_order_.push_back(v);
    }
  }
}

double NetworkSimplex::reduced_cost(std::size_t arc) const {
  return cost_[arc] + potential_[tail_[arc]] - potential_[head_[arc]];
}

NetworkSimplex::Status NetworkSimplex::run(std::size_t max_pivots) {
  struct CycleArc {
    int arc;
    bool forward;
  };
  std::vector<CycleArc> cycle;
  std::vector<int> u_side;

  for (;;) {
    std::size_t entering = tail_.size();
    for (std::size_t a = 0; a < tail_.size(); ++a) {
      if (in_tree_[a]) continue;
      if (reduced_cost(a) < -epsilon_) {
        entering = a;
        break;
      }
    }
    if (entering == tail_.size()) break;
    if (pivots_ >= max_pivots) return Status::PivotLimit;
    ++pivots_;

    const int u = tail_[entering];
    const int v = head_[entering];
    int a = u;
    int b = v;
    while (depth_[a] > depth_[b]) a = parent_[a];
    while (depth_[b] > depth_[a]) b = parent_[b];
    while (a != b) {
      a = parent_[a];
      b = parent_[b];
    }
    const int apex = a;

    // Cycle order from the apex: down to u, across the entering arc, up from v.
    cycle.clear();
    u_side.clear();
    for (int x = u; x != apex; x = parent_[x]) u_side.push_back(x);
    for (auto it = u_side.rbegin(); it != u_side.rend(); ++it) {
      cycle.push_back({pred_arc_[*it], !pred_up_[*it]});
    }
    for (int x = v; x != apex; x = parent_[x]) {
      cycle.push_back({pred_arc_[x], static_cast<bool>(pred_up_[x])});
    }

    int leaving = -1;
    std::int64_t delta = std::numeric_limits<std::int64_t>::max();
    for (const CycleArc& c : cycle) {
      if (c.forward) continue;
      if (flow_[c.arc] <= delta) {
        delta = flow_[c.arc];
        leaving = c.arc;
      }
    }
    // Costs are nonnegative, so every negative cycle has a backward arc.
    if (leaving < 0) return Status::Infeasible;

    for (const CycleArc& c : cycle) flow_[c.arc] += c.forward ? delta : -delta;
    flow_[entering] += delta;
    in_tree_[leaving] = 0;
    in_tree_[entering] = 1;
    rebuild_tree();
  }

  for (std::size_t a = original_arcs_; a < tail_.size(); ++a) {
    if (flow_[a] != 0) return Status::Infeasible;
  }
  return Status::Optimal;
}

std::vector<double> NetworkSimplex::basis_flows(const std::vector<double>& supply) const {
  std::vector<double> excess(nodes_ + 1, 0.0);
  for (int v = 0; v < nodes_; ++v) excess[v] = supply[v];
  std::vector<double> out(original_arcs_, 0.0);
  for (auto it = bfs_order_.rbegin(); it != bfs_order_.rend(); ++it) {
    const int x = *it;
    if (x == root_) continue;
    const int arc = pred_arc_[x];
    const double f = pred_up_[x] ? excess[x] : -excess[x];
    excess[parent_[x]] += excess[x];
    if (static_cast<std::size_t>(arc) < original_arcs_) out[arc] = f;
  }
  return out;
}

}  // namespace branched::detail
