#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "branched/measures.hpp"
#include "branched/network_extract.hpp"

namespace branched {

/// Positive-mass terminals in label order: sources, then sinks.
struct TerminalSet {
  std::size_t dimension = 0;
  std::vector<Point> positions;
  std::vector<double> net_mass;  // +m for sources, -m for sinks
  std::vector<AtomRef> origin;

  std::size_t size() const { return positions.size(); }
};

TerminalSet required_terminals(const SignedConfig& config);

/// A labelled tree on terminals [0, T) and Steiner points [T, T+s).
/// flows[e] is the mass carried from edges[e].first to edges[e].second
/// (negative when it runs the other way); zero-flow edges stand for a
/// forest and cost nothing.
struct Topology {
  std::size_t terminals = 0;
  std::size_t steiner = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<double> flows;

  bool operator==(const Topology&) const = default;
};

class OracleBudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kTopologyCap = 1000000;

/// All trees on the positive-mass terminals plus s = 0..s_max Steiner
/// points of degree >= 3, one representative per Steiner relabelling, in
/// a fixed order.
std::vector<Topology> enumerate_topologies(const SignedConfig& config, std::size_t s_max,
                                           std::size_t cap = kTopologyCap);

struct TopologySolution {
  std::vector<Point> steiner;
  double cost = 0.0;  // sum |e| |flow_e|^(1/q)
  double stationarity = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Minimizes sum |flow_e|^(1/q) |e| over the Steiner positions with
/// Gauss-Seidel Weiszfeld sweeps.
TopologySolution solve_topology(const Topology& t, const TerminalSet& terminals, double q);

struct RankedTopology {
  std::size_t topology = 0;  // index into the enumeration
  double cost = 0.0;
  bool converged = false;
};

struct OracleSolution {
  double q = 2.0;
  TerminalSet terminals;
  Topology topology;
  std::vector<Point> steiner;
  double cost = 0.0;
  std::vector<RankedTopology> table;  // ascending cost

  /// The optimal network with zero-flow edges dropped and edges shorter
  /// than 1e-9 contracted.
  WeightedDigraph graph() const;
};

/// Default Steiner budget 2N - 2 with N = atoms_per_side.
OracleSolution oracle(const SignedConfig& config, double q,
                      std::optional<std::size_t> s_max = std::nullopt);

}  // namespace branched
