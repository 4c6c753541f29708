#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "branched/transport_flow.hpp"

namespace branched {

/// Flows at or below this fraction of the total mass count as zero.
inline constexpr double kZeroFlow = 1e-12;

/// Removes every directed cycle of positive flow by subtracting the
/// cycle's minimum arc flow. Never increases the plan cost.
TransportPlan cancel_cycles(TransportPlan plan);

/// Whenever two distinct positive paths share both endpoints, moves the
/// bottleneck flow of the dearer path (sum of |.|^q along it) onto the
/// cheaper one. Requires an acyclic plan.
TransportPlan merge_parallel_paths(TransportPlan plan, const Embedding& pos, double q);

/// merge_parallel_paths after cancel_cycles.
TransportPlan regularize(TransportPlan plan, const Embedding& pos, double q);

enum class Irregularity { None, SelfLoop, Cycle, ParallelPaths };

struct RegularityCheck {
  bool regular = true;
  Irregularity kind = Irregularity::None;
  // SelfLoop: {i, i}. Cycle: closed node sequence. ParallelPaths: two paths
  // with common endpoints and disjoint interiors.
  std::vector<NodeId> first;
  std::vector<NodeId> second;

  explicit operator bool() const { return regular; }
};

RegularityCheck is_regular(const TransportPlan& plan);

/// A path i_1 -> ... -> i_k of positive arcs whose interior nodes have
/// exactly one incoming and one outgoing arc.
struct Chain {
  std::vector<NodeId> nodes;
  double flow = 0.0;
};

/// Splits the positive support of a regular plan into maximal chains.
/// Throws std::invalid_argument for irregular plans or unequal interior flows.
std::vector<Chain> maximal_chains(const TransportPlan& plan);

}  // namespace branched
