#include "branched/atom_allocator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace branched {

std::vector<double> optimal_fractions(const WeightedDigraph& g, double q) {
  if (g.edges.empty()) throw std::invalid_argument("graph has no edges");
  std::vector<double> w;
  w.reserve(g.edges.size());
  for (const Edge& e : g.edges) {
    if (!(e.weight > 0.0) || !(e.length > 0.0))
      throw std::invalid_argument("allocation needs positive edge weights and lengths");
    w.push_back(std::pow(e.weight, 1.0 / q) * e.length);
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= total;
  return w;
}

double fraction_objective(const WeightedDigraph& g, std::span<const double> w, double q) {
  double s = 0.0;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const Edge& edge = g.edges[e];
    s += edge.weight * std::pow(edge.length, q) / std::pow(w[e], q - 1.0);
  }
  return s;
}

std::vector<std::size_t> largest_remainder(std::span<const double> weights, std::size_t n,
                                           bool at_least_one) {
  const std::size_t m = weights.size();
  std::vector<std::size_t> counts(m, 0);
  if (m == 0 || n == 0) return counts;
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("rounding weights must have positive sum");

  std::vector<double> remainder(m);
  std::size_t assigned = 0;
  for (std::size_t e = 0; e < m; ++e) {
    const double exact = static_cast<double>(n) * weights[e] / total;
    counts[e] = static_cast<std::size_t>(std::floor(exact));
    remainder[e] = exact - static_cast<double>(counts[e]);
    assigned += counts[e];
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++counts[order[k % m]];

  if (at_least_one) {
    if (n < m) throw std::invalid_argument("fewer units than entries");
    for (std::size_t e = 0; e < m; ++e) {
      if (counts[e] != 0) continue;
      counts[e] = 1;
      auto largest = std::max_element(counts.begin(), counts.end());
      --*largest;
    }
  }
  return counts;
}

FreeAtoms Allocation::free_atoms(std::size_t dimension) const {
  FreeAtoms z(dimension, atoms.size());
  for (std::size_t k = 0; k < atoms.size(); ++k)
    std::copy(atoms[k].position.begin(), atoms[k].position.end(), z[k].begin());
  return z;
}

Allocation allocate(const WeightedDigraph& g, std::size_t n, double q) {
  if (n < g.edges.size()) throw std::invalid_argument("need at least one atom per edge");
  Allocation out;
  const std::vector<double> w = optimal_fractions(g, q);
  out.counts = largest_remainder(w, n, true);
  double bound = 0.0;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const Edge& edge = g.edges[e];
    const std::size_t ne = out.counts[e];
    out.fractions.push_back(static_cast<double>(ne) / static_cast<double>(n));
    const Point& a = g.vertices[edge.tail].position;
    const Point& b = g.vertices[edge.head].position;
    for (std::size_t l = 1; l <= ne; ++l) {
      const double t = static_cast<double>(l) / static_cast<double>(ne + 1);
      AllocatedAtom atom;
      atom.position.resize(g.dimension);
      for (std::size_t d = 0; d < g.dimension; ++d) atom.position[d] = a[d] + t * (b[d] - a[d]);
      atom.mass = edge.weight;
      atom.edge = e;
      out.atoms.push_back(std::move(atom));
    }
    bound += edge.weight * std::pow(edge.length, q) *
             std::pow(static_cast<double>(ne + 1), 1.0 - q);
  }
  out.chain_bound = std::pow(bound, 1.0 / q);
  return out;
}

double realized_bound(const SignedConfig& config, const Allocation& allocation, double q) {
  const double cost = min_cost_plan(config, allocation.free_atoms(config.dimension), q).cost;
  return std::pow(cost, 1.0 / q);
}

}  // namespace branched
