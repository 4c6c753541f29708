#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "branched/network_extract.hpp"
#include "branched/transport_flow.hpp"

namespace branched {

/// Fractions w_e proportional to m_e^(1/q) |e|, the minimizer of
/// F(w) = sum m_e |e|^q / w_e^(q-1) on the simplex.
std::vector<double> optimal_fractions(const WeightedDigraph& g, double q);

/// F(w) = sum m_e |e|^q / w_e^(q-1).
double fraction_objective(const WeightedDigraph& g, std::span<const double> w, double q);

/// Hamilton rounding of n * weights / sum(weights). With `at_least_one`,
/// every entry receives one unit first and the rest is apportioned on the
/// remaining budget. Ties go to the lower index.
std::vector<std::size_t> largest_remainder(std::span<const double> weights, std::size_t n,
                                           bool at_least_one);

struct AllocatedAtom {
  Point position;
  double mass = 0.0;
  std::size_t edge = 0;
};

struct Allocation {
  std::vector<std::size_t> counts;  // n_e, summing to n
  std::vector<double> fractions;    // n_e / n
  std::vector<AllocatedAtom> atoms;
  /// (sum m_e |e|^q (n_e+1)^(1-q))^(1/q): the cost of routing each edge
  /// through its own atoms. An upper bound on the n-atom optimum only when
  /// every graph vertex is a terminal; see realized_bound.
  double chain_bound = 0.0;

  FreeAtoms free_atoms(std::size_t dimension) const;
};

/// Places n_e equally spaced interior atoms of mass m_e on each edge.
/// Throws std::invalid_argument if n < |E| or an edge is degenerate.
Allocation allocate(const WeightedDigraph& g, std::size_t n, double q);

/// W_q(mu + plus, mu + minus) for the allocated measure mu, computed
/// exactly; always an upper bound on the n-atom optimum.
double realized_bound(const SignedConfig& config, const Allocation& allocation, double q);

}  // namespace branched
