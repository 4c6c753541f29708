#include "branched/transport_flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <sstream>

#include "network_simplex.hpp"

namespace branched {

FreeAtoms::FreeAtoms(std::size_t dimension, std::vector<double> coords)
    : dim_(dimension), coords_(std::move(coords)) {
  if (dim_ == 0 || coords_.size() % dim_ != 0)
    throw std::invalid_argument("free atom coordinates do not match dimension");
}

FreeAtoms FreeAtoms::from_points(std::size_t dimension, const std::vector<Point>& points) {
  FreeAtoms atoms(dimension, points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (points[k].size() != dimension)
      throw std::invalid_argument("free atom dimension mismatch");
    std::copy(points[k].begin(), points[k].end(), atoms[k].begin());
  }
  return atoms;
}

std::vector<Point> FreeAtoms::points() const {
  std::vector<Point> out;
  out.reserve(size());
  for (std::size_t k = 0; k < size(); ++k) out.emplace_back((*this)[k].begin(), (*this)[k].end());
  return out;
}

Embedding::Embedding(const SignedConfig& config, const FreeAtoms& atoms)
    : layout_(config.sources.size(), config.sinks.size(), atoms.size()),
      dim_(config.dimension) {
  if (atoms.size() > 0 && atoms.dimension() != dim_)
    throw std::invalid_argument("free atom dimension differs from the configuration");
  coords_.reserve(layout_.size() * dim_);
  for (const Atom& a : config.sources) coords_.insert(coords_.end(), a.position.begin(), a.position.end());
  for (const Atom& a : config.sinks) coords_.insert(coords_.end(), a.position.begin(), a.position.end());
  coords_.insert(coords_.end(), atoms.coords().begin(), atoms.coords().end());
}

double TransportPlan::operator()(NodeId from, NodeId to) const {
  auto it = entries_.find({from, to});
  return it == entries_.end() ? 0.0 : it->second;
}

void TransportPlan::set(NodeId from, NodeId to, double value) {
  if (from >= layout_.size() || to >= layout_.size() || !layout_.can_send(from) ||
      !layout_.can_receive(to)) {
    throw std::out_of_range("plan arc is not representable");
  }
  if (value == 0.0) {
    entries_.erase({from, to});
  } else {
    entries_[{from, to}] = value;
  }
}

void TransportPlan::add(NodeId from, NodeId to, double delta) {
  set(from, to, (*this)(from, to) + delta);
}

double TransportPlan::outflow(NodeId v) const {
  double s = 0.0;
  for (auto it = entries_.lower_bound({v, 0}); it != entries_.end() && it->first.first == v; ++it)
    s += it->second;
  return s;
}

double TransportPlan::inflow(NodeId v) const {
  double s = 0.0;
  for (const auto& [arc, g] : entries_)
    if (arc.second == v) s += g;
  return s;
}

double TransportPlan::throughput(NodeId v) const {
  return layout_.role(v) == NodeRole::Sink ? inflow(v) : outflow(v);
}

double TransportPlan::total_mass() const {
  double s = 0.0;
  for (std::size_t i = 0; i < layout_.sources(); ++i) s += outflow(layout_.source(i));
  return s;
}

std::vector<PlanTriplet> to_triplets(const TransportPlan& plan) {
  const NodeLayout& l = plan.layout();
  std::vector<PlanTriplet> out;
  out.reserve(plan.entries().size());
  for (const auto& [arc, g] : plan.entries()) {
    const auto [from, to] = arc;
    const std::size_t row = l.role(from) == NodeRole::Source ? l.local(from) : l.sources() + l.local(from);
    const std::size_t col = l.role(to) == NodeRole::Sink ? l.local(to) : l.sinks() + l.local(to);
    out.push_back({row, col, g});
  }
  return out;
}

TransportPlan from_triplets(const NodeLayout& layout, const std::vector<PlanTriplet>& triplets) {
  TransportPlan plan(layout);
  for (const PlanTriplet& t : triplets) {
    if (t.row >= layout.sources() + layout.free() || t.col >= layout.sinks() + layout.free())
      throw std::out_of_range("plan triplet index out of range");
    if (!(t.value >= 0.0)) throw std::invalid_argument("plan entries must be nonnegative");
    const NodeId from = t.row < layout.sources() ? layout.source(t.row)
                                                 : layout.free_atom(t.row - layout.sources());
    const NodeId to =
        t.col < layout.sinks() ? layout.sink(t.col) : layout.free_atom(t.col - layout.sinks());
    if (from == to) throw std::invalid_argument("self loops are not allowed in a plan");
    plan.add(from, to, t.value);
  }
  return plan;
}

double arc_cost(const Embedding& pos, NodeId from, NodeId to, double q) {
  const double d = distance(pos[from], pos[to]);
  return q == 2.0 ? d * d : std::pow(d, q);
}

double plan_cost(const TransportPlan& plan, const Embedding& pos, double q) {
  double s = 0.0;
  for (const auto& [arc, g] : plan.entries()) s += g * arc_cost(pos, arc.first, arc.second, q);
  return s;
}

FeasibilityReport check_feasibility(const TransportPlan& plan, const SignedConfig& config,
                                    double relative_tolerance) {
  FeasibilityReport report;
  const NodeLayout& l = plan.layout();
  const double scale = std::max(total_mass(config), std::numeric_limits<double>::min());
  auto record = [&](double violation, const std::string& what) {
    const double rel = violation / scale;
    if (rel > report.worst_violation) {
      report.worst_violation = rel;
      if (rel > relative_tolerance) {
        report.feasible = false;
        report.witness = what;
      }
    }
  };
  if (l.sources() != config.sources.size() || l.sinks() != config.sinks.size()) {
    report.feasible = false;
    report.witness = "layout does not match configuration";
    return report;
  }
  for (const auto& [arc, g] : plan.entries()) {
    if (g < 0.0) {
      std::ostringstream w;
      w << "negative entry at (" << arc.first << "," << arc.second << ")";
      record(-g, w.str());
    }
  }
  for (std::size_t i = 0; i < l.sources(); ++i) {
    std::ostringstream w;
    w << "source " << i << " marginal";
    record(std::abs(plan.outflow(l.source(i)) - config.sources[i].mass), w.str());
  }
  for (std::size_t j = 0; j < l.sinks(); ++j) {
    std::ostringstream w;
    w << "sink " << j << " marginal";
    record(std::abs(plan.inflow(l.sink(j)) - config.sinks[j].mass), w.str());
  }
  for (std::size_t k = 0; k < l.free(); ++k) {
    const NodeId v = l.free_atom(k);
    std::ostringstream w;
    w << "free atom " << k << " conservation";
    record(std::abs(plan.inflow(v) - plan.outflow(v)), w.str());
  }
  return report;
}

CostMatrix cost_matrix(const SignedConfig& config, const FreeAtoms& atoms, double q) {
  const Embedding pos(config, atoms);
  const NodeLayout& l = pos.layout();
  CostMatrix m(l.sources() + l.free(), l.sinks() + l.free());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const NodeId from = r < l.sources() ? l.source(r) : l.free_atom(r - l.sources());
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const NodeId to = c < l.sinks() ? l.sink(c) : l.free_atom(c - l.sinks());
      m(r, c) = from == to ? std::numeric_limits<double>::infinity() : arc_cost(pos, from, to, q);
    }
  }
  return m;
}

namespace {

constexpr double kMassDenominator = 1e9;

// Integer supplies with common denominator 1e9 of the total mass. The
// rounding residual is folded into the largest atom on the side that needs
// it so that supplies balance exactly.
std::vector<std::int64_t> scaled_supplies(const SignedConfig& config, const NodeLayout& l) {
  const double total = total_mass(config);
  std::vector<std::int64_t> supply(l.size(), 0);
  std::int64_t plus = 0;
  std::int64_t minus = 0;
  for (std::size_t i = 0; i < l.sources(); ++i) {
    supply[l.source(i)] = std::llround(config.sources[i].mass / total * kMassDenominator);
    plus += supply[l.source(i)];
  }
  for (std::size_t j = 0; j < l.sinks(); ++j) {
    supply[l.sink(j)] = -std::llround(config.sinks[j].mass / total * kMassDenominator);
    minus -= supply[l.sink(j)];
  }
  const std::int64_t residual = plus - minus;
  if (residual != 0) {
    auto by_mass = [](const std::vector<Atom>& atoms) {
      return static_cast<std::size_t>(
          std::max_element(atoms.begin(), atoms.end(),
                           [](const Atom& a, const Atom& b) { return a.mass < b.mass; }) -
          atoms.begin());
    };
    // more supply than demand: enlarge the largest sink
    supply[l.sink(by_mass(config.sinks))] -= residual;
  }
  return supply;
}

}  // namespace

PlanSolution min_cost_plan(const SignedConfig& config, const FreeAtoms& atoms, double q) {
  const Embedding pos(config, atoms);
  const NodeLayout& l = pos.layout();

  // Arcs in lexicographic (tail, head) order.
  std::vector<detail::FlowArc> arcs;
  std::vector<std::pair<NodeId, NodeId>> ends;
  for (NodeId u = 0; u < l.size(); ++u) {
    if (!l.can_send(u)) continue;
    for (NodeId v = 0; v < l.size(); ++v) {
      if (u == v || !l.can_receive(v)) continue;
      arcs.push_back({static_cast<int>(u), static_cast<int>(v), arc_cost(pos, u, v, q)});
      ends.emplace_back(u, v);
    }
  }

  const std::size_t arc_count = arcs.size();
  detail::NetworkSimplex simplex(static_cast<int>(l.size()), std::move(arcs),
                                 scaled_supplies(config, l));
  const std::size_t limit = 50 * (arc_count + l.size()) + 10000;
  const auto status = simplex.run(limit);
  if (status == detail::NetworkSimplex::Status::PivotLimit)
    throw SolverError("min-cost flow did not converge", simplex.pivots());
  if (status == detail::NetworkSimplex::Status::Infeasible)
    throw SolverError("min-cost flow is infeasible", simplex.pivots());

  std::vector<double> supply(l.size(), 0.0);
  for (std::size_t i = 0; i < l.sources(); ++i) supply[l.source(i)] = config.sources[i].mass;
  for (std::size_t j = 0; j < l.sinks(); ++j) supply[l.sink(j)] = -config.sinks[j].mass;
  std::vector<double> flows = simplex.basis_flows(supply);

  const double zero = 1e-12 * total_mass(config);
  if (std::any_of(flows.begin(), flows.end(), [&](double g) { return g < -zero; })) {
    // The basis optimal for the rounded supplies is primal infeasible for
    // the exact ones; keep the scaled integer solution instead.
    for (std::size_t a = 0; a < arc_count; ++a)
      flows[a] = static_cast<double>(simplex.flow(a)) / kMassDenominator * total_mass(config);
  }
  PlanSolution out{TransportPlan(l), 0.0, simplex.pivots()};
  for (std::size_t a = 0; a < arc_count; ++a) {
    if (flows[a] > 0.0) out.plan.set(ends[a].first, ends[a].second, flows[a]);
  }
  out.cost = plan_cost(out.plan, pos, q);
  return out;
}

double wasserstein_q(std::span<const Atom> plus, std::span<const Atom> minus, double q) {
  if (!(q >= 1.0)) throw ValidationError("Wasserstein exponent must be at least 1");
  if (plus.empty() || minus.empty()) throw ValidationError("empty measure");
  SignedConfig config;
  config.dimension = plus.front().position.size();
  config.sources.assign(plus.begin(), plus.end());
  config.sinks.assign(minus.begin(), minus.end());
  config = validate(std::move(config));
  const double cost = min_cost_plan(config, FreeAtoms(config.dimension, 0), q).cost;
  return std::pow(std::max(cost, 0.0), 1.0 / q);
}

}  // namespace branched
