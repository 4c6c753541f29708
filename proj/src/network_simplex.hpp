#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace branched::detail {

struct FlowArc {
  int tail;
  int head;
  double cost;
};

/// Primal network simplex for uncapacitated transshipment with integer
/// supplies.
///
/// An artificial root joins every node; the initial tree is strongly
/// feasible and the leaving arc rule keeps it so. The entering arc is the
/// lowest-index arc with negative reduced cost.
class NetworkSimplex {
 public:
  enum class Status { Optimal, Infeasible, PivotLimit };

  NetworkSimplex(int nodes, std::vector<FlowArc> arcs, std::vector<std::int64_t> supply);

  Status run(std::size_t max_pivots);

  std::size_t pivots() const { return pivots_; }
  std::int64_t flow(std::size_t arc) const { return flow_[arc]; }

  /// Recomputes basic arc flows for real-valued supplies on the final
  /// spanning tree. Returns one value per original arc; non-basic arcs are 0.
  std::vector<double> basis_flows(const std::vector<double>& supply) const;

 private:
  void rebuild_tree();
  double reduced_cost(std::size_t arc) const;

  int nodes_;
  int root_;
  std::size_t original_arcs_;
  std::vector<int> tail_;
  std::vector<int> head_;
  std::vector<double> cost_;
  std::vector<std::int64_t> flow_;
  std::vector<char> in_tree_;

  // tree structure, rebuilt after each pivot
  std::vector<int> parent_;
  std::vector<int> pred_arc_;
  std::vector<char> pred_up_;  // pred arc points child -> parent
  std::vector<int> depth_;
  std::vector<double> potential_;
  std::vector<int> bfs_order_;

  double epsilon_ = 0.0;
  std::size_t pivots_ = 0;
};

}  // namespace branched::detail
