#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "branched/bruteforce_oracle.hpp"
#include "branched/position_optimizer.hpp"

namespace branched {

struct SweepRecord {
  std::size_t n = 0;
  double wbar = 0.0;
  double rescaled = 0.0;
  double upper = 0.0;  // NaN when n is smaller than the oracle edge count
  double lower = 0.0;
  double hausdorff = 0.0;
  double seconds = 0.0;
  bool converged = false;
  std::string error;  // non-empty when this n failed
  std::optional<SolveResult> solution;
};

struct SweepOptions {
  std::vector<std::size_t> ns;
  CostParams params;
  /// Hausdorff sampling step as a fraction of the terminal diameter.
  double resolution_fraction = 1e-4;
  /// Also start from the atoms allocated along the oracle network.
  bool guide_seed = true;
  bool keep_solutions = false;
};

struct SweepResult {
  OracleSolution oracle;
  std::vector<SweepRecord> records;
};

/// For each n: the best n-atom solution, its rescaled value, the upper
/// bound from allocating n atoms along the oracle network, the lower bound
/// limit * (n / (n + 2N^3))^(1-1/q), and the Hausdorff distance between
/// the solution's reduced tree and the oracle network. A failure at one n is
/// recorded and the sweep moves on.
SweepResult run_sweep(const SignedConfig& config, const SweepOptions& options);

/// Upper bound on the rescaled n-atom optimum, or NaN if n < |E|.
double rescaled_upper_bound(const SignedConfig& config, const WeightedDigraph& network,
                            std::size_t n, double q);
double rescaled_lower_bound(double limit, std::size_t atoms_per_side, std::size_t n, double q);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records);

}  // namespace branched
