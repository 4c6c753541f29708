#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "branched/measures.hpp"
#include "branched/transport_flow.hpp"

namespace branched {

/// d/dz_k of sum gamma_uv |p_u - p_v|^q for every free atom k. Coincident
/// endpoints contribute the zero subgradient.
std::vector<Point> grad_Z(const SignedConfig& config, const FreeAtoms& atoms,
                          const TransportPlan& plan, double q);

struct PositionResult {
  FreeAtoms atoms;
  double cost = 0.0;
  double grad_norm = 0.0;  // max-norm over atoms with positive throughput
  std::size_t iterations = 0;
  bool converged = false;
};

/// Minimizes the plan cost over free-atom positions with the plan held
/// fixed. Each step is a Newton direction (gradient when that fails to
/// descend) with Armijo backtracking by halving. Atoms without throughput
/// keep their starting position.
PositionResult optimize_positions(const SignedConfig& config, const TransportPlan& plan,
                                  FreeAtoms start, const CostParams& params);

struct SolveResult {
  std::size_t n = 0;
  double q = 2.0;
  FreeAtoms atoms;
  TransportPlan plan;
  double cost_q = 0.0;    // F_q = W_q^q
  double wbar = 0.0;      // cost_q^(1/q)
  double rescaled = 0.0;  // n^(1-1/q) wbar
  std::size_t rounds = 0;
  bool converged = false;
  bool monotone = true;
  std::size_t best_start = 0;
  std::vector<double> start_costs;
  std::vector<std::size_t> unused_atoms;
};

/// Atoms spread over the segments of an optimal W_1 matching in proportion
/// to gamma^(1/q) |x - y|, equally spaced inside each segment.
FreeAtoms matching_seed(const SignedConfig& config, std::size_t n, double q);

/// Uniform sample in the terminal bounding box.
FreeAtoms random_seed(const SignedConfig& config, std::size_t n, std::mt19937_64& rng);

/// One alternating run from a given start: exact plan, regularization,
/// position solve, repeated until the relative decrease falls below
/// params.round_tolerance.
SolveResult alternate_from(const SignedConfig& config, FreeAtoms start, const CostParams& params);

/// Best of: the matching seed, each of `extra_starts`, and params.restarts
/// random starts. Ties keep the earliest start. n = 0 reduces to W_q.
SolveResult alternate_minimize(const SignedConfig& config, std::size_t n, const CostParams& params,
                               const std::vector<FreeAtoms>& extra_starts = {});

}  // namespace branched
