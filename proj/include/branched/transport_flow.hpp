#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "branched/measures.hpp"

namespace branched {

using NodeId = std::size_t;

enum class NodeRole { Source, Sink, Free };

/// Node numbering for a transport network: sources [0, S), sinks [S, S+T),
/// free atoms [S+T, S+T+n).
class NodeLayout {
 public:
  NodeLayout() = default;
  NodeLayout(std::size_t sources, std::size_t sinks, std::size_t free)
      : sources_(sources), sinks_(sinks), free_(free) {}

  std::size_t sources() const { return sources_; }
  std::size_t sinks() const { return sinks_; }
  std::size_t free() const { return free_; }
  std::size_t size() const { return sources_ + sinks_ + free_; }

  NodeId source(std::size_t i) const { return i; }
  NodeId sink(std::size_t j) const { return sources_ + j; }
  NodeId free_atom(std::size_t k) const { return sources_ + sinks_ + k; }

  NodeRole role(NodeId v) const {
    if (v < sources_) return NodeRole::Source;
    if (v < sources_ + sinks_) return NodeRole::Sink;
    return NodeRole::Free;
  }
  /// Index within the node's own group.
  std::size_t local(NodeId v) const {
    switch (role(v)) {
      case NodeRole::Source: return v;
      case NodeRole::Sink: return v - sources_;
      case NodeRole::Free: return v - sources_ - sinks_;
    }
    return v;
  }
  bool can_send(NodeId v) const { return role(v) != NodeRole::Sink; }
  bool can_receive(NodeId v) const { return role(v) != NodeRole::Source; }

  bool operator==(const NodeLayout&) const = default;

 private:
  std::size_t sources_ = 0;
  std::size_t sinks_ = 0;
  std::size_t free_ = 0;
};

/// Positions of the n free atoms, stored flat.
class FreeAtoms {
 public:
  FreeAtoms() = default;
  FreeAtoms(std::size_t dimension, std::size_t count)
      : dim_(dimension), coords_(dimension * count, 0.0) {}
  FreeAtoms(std::size_t dimension, std::vector<double> coords);
  static FreeAtoms from_points(std::size_t dimension, const std::vector<Point>& points);

  std::size_t dimension() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }

  std::span<const double> operator[](std::size_t k) const {
    return {coords_.data() + k * dim_, dim_};
  }
  std::span<double> operator[](std::size_t k) { return {coords_.data() + k * dim_, dim_}; }

  const std::vector<double>& coords() const { return coords_; }
  std::vector<double>& coords() { return coords_; }
  std::vector<Point> points() const;

  bool operator==(const FreeAtoms&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

/// Positions of every node of a layout (terminals followed by free atoms).
class Embedding {
 public:
  Embedding(const SignedConfig& config, const FreeAtoms& atoms);

  const NodeLayout& layout() const { return layout_; }
  std::size_t dimension() const { return dim_; }
  std::span<const double> operator[](NodeId v) const { return {coords_.data() + v * dim_, dim_}; }

 private:
  NodeLayout layout_;
  std::size_t dim_;
  std::vector<double> coords_;
};

/// Sparse nonnegative flow gamma(u, v) over a NodeLayout.
///
/// Only arcs from a source or free atom into a sink or free atom are
/// representable; zero entries are not stored.
class TransportPlan {
 public:
  using Entries = std::map<std::pair<NodeId, NodeId>, double>;

  TransportPlan() = default;
  explicit TransportPlan(NodeLayout layout) : layout_(layout) {}

  const NodeLayout& layout() const { return layout_; }
  const Entries& entries() const { return entries_; }

  double operator()(NodeId from, NodeId to) const;
  void set(NodeId from, NodeId to, double value);
  void add(NodeId from, NodeId to, double delta);

  double outflow(NodeId v) const;
  double inflow(NodeId v) const;
  /// Mass of a node's atom: outflow for sources and free atoms, inflow for sinks.
  double throughput(NodeId v) const;
  /// Total source outflow.
  double total_mass() const;

  bool operator==(const TransportPlan&) const = default;

 private:
  NodeLayout layout_;
  Entries entries_;
};

/// Row/column form of a plan entry: rows are sources then free atoms,
/// columns are sinks then free atoms.
struct PlanTriplet {
  std::size_t row;
  std::size_t col;
  double value;
};

std::vector<PlanTriplet> to_triplets(const TransportPlan& plan);
TransportPlan from_triplets(const NodeLayout& layout, const std::vector<PlanTriplet>& triplets);

/// F(u, v) = |p_u - p_v|^q, and the plan cost sum gamma * F.
double arc_cost(const Embedding& pos, NodeId from, NodeId to, double q);
double plan_cost(const TransportPlan& plan, const Embedding& pos, double q);

struct FeasibilityReport {
  bool feasible = true;
  double worst_violation = 0.0;  // relative to total mass
  std::string witness;
};

/// Checks nonnegativity, both terminal marginals and free-atom conservation.
FeasibilityReport check_feasibility(const TransportPlan& plan, const SignedConfig& config,
                                    double relative_tolerance = 1e-9);

/// Dense cost table. Rows: sources then free atoms. Columns: sinks then
/// free atoms. Free-atom self pairs carry +infinity.
class CostMatrix {
 public:
  CostMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

 private:
  std::size_t rows_, cols_;
  std::vector<double> data_;
};

CostMatrix cost_matrix(const SignedConfig& config, const FreeAtoms& atoms, double q);

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::size_t iterations)
      : std::runtime_error(what), iterations_(iterations) {}
  std::size_t iterations() const { return iterations_; }

 private:
  std::size_t iterations_;
};

struct PlanSolution {
  TransportPlan plan;
  double cost = 0.0;  // sum gamma * |.|^q
  std::size_t pivots = 0;
};

/// Exact min-cost transshipment from sources to sinks with the free atoms
/// as relay nodes. The returned plan is a basic (forest-supported) optimum.
PlanSolution min_cost_plan(const SignedConfig& config, const FreeAtoms& atoms, double q);

/// (min sum |x - y|^q gamma)^(1/q) over couplings; q >= 1.
double wasserstein_q(std::span<const Atom> plus, std::span<const Atom> minus, double q);

}  // namespace branched
