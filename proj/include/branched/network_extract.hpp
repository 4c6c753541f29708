#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "branched/measures.hpp"
#include "branched/transport_flow.hpp"

namespace branched {

enum class VertexRole { Source, Sink, Free };

struct Vertex {
  Point position;
  VertexRole role = VertexRole::Free;
  std::size_t index = 0;  // terminal index, or free atom / Steiner index
};

struct Edge {
  std::size_t tail = 0;
  std::size_t head = 0;
  double weight = 0.0;  // m_e
  double length = 0.0;  // |e|
};

/// An embedded directed graph with edge capacities.
struct WeightedDigraph {
  std::size_t dimension = 0;
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;

  /// Number of distinct neighbours.
  std::size_t degree(std::size_t v) const;
  std::vector<double> net_outflow() const;
};

/// A graph whose chains have been collapsed to single straight edges.
/// `chains[e]` lists the positions along the original chain of edge e,
/// tail first.
struct ReducedTree {
  WeightedDigraph graph;
  std::vector<std::vector<Point>> chains;
};

/// One vertex per terminal plus one per free atom with positive
/// throughput; one edge per positive plan entry. Requires a regular plan.
WeightedDigraph plan_to_graph(const SignedConfig& config, const FreeAtoms& atoms,
                              const TransportPlan& plan);

/// Collapses every maximal chain through degree-2 free vertices.
/// Throws std::invalid_argument when a chain's flow is not constant or the
/// graph has a directed cycle.
ReducedTree reduce_graph(const WeightedDigraph& g);

/// sum |e| m_e^(1/q).
double graph_cost(const WeightedDigraph& g, double q);

/// sum m_e |e|^q.
double graph_transport_cost(const WeightedDigraph& g, double q);

/// Cost of the chains as walked minus the cost of the straight reduced edges.
double straightness_defect(const ReducedTree& t, double q);

struct StructureCheck {
  std::string item;
  bool pass = true;
  std::string witness;
};

struct StructureReport {
  std::vector<StructureCheck> checks;

  bool all_pass() const;
  const StructureCheck* find(const std::string& item) const;
};

inline constexpr double kCollinearTolerance = 1e-5;

/// Smallest positive |sum of signed terminal masses| over subsets of the
/// positive-mass terminals. Every edge of a tree routing the terminals
/// carries one such sum. Returns 0 when there are more than 20 terminals.
double smallest_subset_imbalance(const SignedConfig& config);

/// Checks the reduced-tree properties: flux, acyclicity, interior degree,
/// vertex count, straight equally spaced chains, edge weights within
/// [smallest_subset_imbalance, total mass] and containment in the terminal
/// box inflated by 10%.
StructureReport verify_structure(const ReducedTree& t, const SignedConfig& config);

}  // namespace branched
