#include "branched/sweep.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <ostream>

#include "branched/atom_allocator.hpp"
#include "branched/hausdorff.hpp"

namespace branched {

double rescaled_upper_bound(const SignedConfig& config, const WeightedDigraph& network,
                            std::size_t n, double q) {
  if (n == 0 || n < network.edges.size()) return std::numeric_limits<double>::quiet_NaN();
  const Allocation a = allocate(network, n, q);
  return std::pow(static_cast<double>(n), 1.0 - 1.0 / q) * realized_bound(config, a, q);
}

double rescaled_lower_bound(double limit, std::size_t atoms_per_side, std::size_t n, double q) {
  const double N = static_cast<double>(atoms_per_side);
  const double x = static_cast<double>(n);
  return limit * std::pow(x / (x + 2.0 * N * N * N), 1.0 - 1.0 / q);
}

SweepResult run_sweep(const SignedConfig& config, const SweepOptions& options) {
  const double q = options.params.q;
  SweepResult result;
  result.oracle = oracle(config, q);
  const WeightedDigraph network = result.oracle.graph();
  const double resolution = options.resolution_fraction * terminal_diameter(config);

  for (std::size_t n : options.ns) {
    SweepRecord rec;
    rec.n = n;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      std::vector<FreeAtoms> extra;
      if (options.guide_seed && n > 0 && n >= network.edges.size())
        extra.push_back(allocate(network, n, q).free_atoms(config.dimension));
      SolveResult s = alternate_minimize(config, n, options.params, extra);
      rec.wbar = s.wbar;
      rec.rescaled = s.rescaled;
      rec.converged = s.converged;
      rec.upper = rescaled_upper_bound(config, network, n, q);
      rec.lower = rescaled_lower_bound(result.oracle.cost, config.atoms_per_side(), n, q);
      if (n > 0) {
        const WeightedDigraph g = plan_to_graph(config, s.atoms, s.plan);
        rec.hausdorff = hausdorff(reduce_graph(g).graph, network, resolution);
      } else {
        rec.hausdorff = std::numeric_limits<double>::quiet_NaN();
      }
      if (options.keep_solutions) rec.solution = std::move(s);
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.records.push_back(std::move(rec));
  }
  return result;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
  out << "n,wbar,rescaled,upper,lower,hausdorff,seconds\n";
  out << std::setprecision(17);
  for (const SweepRecord& r : records) {
    if (!r.error.empty()) {
      out << r.n << ",,,,,," << r.seconds << '\n';
      continue;
    }
    out << r.n << ',' << r.wbar << ',' << r.rescaled << ',' << r.upper << ',' << r.lower << ','
        << r.hausdorff << ',' << r.seconds << '\n';
  }
}

}  // namespace branched
