// Acceptance run: prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "branched/atom_allocator.hpp"
#include "branched/bruteforce_oracle.hpp"
#include "branched/hausdorff.hpp"
#include "branched/network_extract.hpp"
#include "branched/plan_regularizer.hpp"
#include "branched/position_optimizer.hpp"
#include "branched/sweep.hpp"
#include "support/oracles.hpp"

using namespace branched;
namespace ts = testing_support;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

SignedConfig unit_edge() {
  SignedConfig c;
  c.dimension = 2;
  c.sources = {{{0, 0}, 1}};
  c.sinks = {{{1, 0}, 1}};
  return c;
}

SignedConfig y_instance() {
  SignedConfig c;
  c.dimension = 2;
  c.sources = {{{-1, 2}, 1}, {{1, 2}, 1}};
  c.sinks = {{{0, 0}, 2}};
  return c;
}

// Shared by criteria 1 to 4.
struct Runs {
  SweepResult edge;
  double edge_seconds = 0.0;
  SweepResult y;
  double y_seconds = 0.0;
};

Runs run_sweeps() {
  Runs r;
  SweepOptions options;
  options.params.restarts = 8;
  options.ns = {1, 2, 4, 8, 16};
  auto t0 = Clock::now();
  r.edge = run_sweep(unit_edge(), options);
  r.edge_seconds = seconds_since(t0);
  options.ns = {6, 12, 24, 48};
  t0 = Clock::now();
  r.y = run_sweep(y_instance(), options);
  r.y_seconds = seconds_since(t0);
  return r;
}

Outcome single_edge(const Runs& runs) {
  Outcome o;
  std::ostringstream d;
  double worst = 0.0;
  for (const SweepRecord& rec : runs.edge.records) {
    if (!rec.error.empty()) {
      o.pass = false;
      d << "n=" << rec.n << " failed: " << rec.error << "; ";
      continue;
    }
    const double n = static_cast<double>(rec.n);
    worst = std::max(worst, std::abs(rec.rescaled - std::sqrt(n / (n + 1.0))));
  }
  // The closed form itself, against a line search over atom positions.
  double closed_form = 0.0;
  for (std::size_t n = 1; n <= 4; ++n)
    closed_form = std::max(closed_form, std::abs(ts::line_chain_brute_force(n, 2.0) - 1.0 / (n + 1.0)));
  o.pass = o.pass && worst < 1e-4 && closed_form < 1e-8 && runs.edge_seconds < 10.0;
  d << "max |rescaled - sqrt(n/(n+1))| = " << worst << " (< 1e-4), closed form vs line search "
    << closed_form << ", " << runs.edge_seconds << " s (< 10 s)";
  o.detail = d.str();
  return o;
}

Outcome y_convergence(const Runs& runs) {
  Outcome o;
  const double limit = 3.0 * std::sqrt(2.0);
  const OracleSolution& oracle = runs.y.oracle;
  const bool steiner_ok = oracle.steiner.size() == 1 && std::abs(oracle.steiner[0][0]) < 1e-6 &&
                          std::abs(oracle.steiner[0][1] - 1.0) < 1e-6;
  const bool cost_ok = std::abs(oracle.cost - limit) < 1e-9 * limit;
  const SweepRecord& last = runs.y.records.back();
  const double gap = std::abs(last.rescaled - limit) / limit;
  o.pass = steiner_ok && cost_ok && last.error.empty() && last.n == 48 && gap < 0.05 &&
           runs.y_seconds < 300.0;
  std::ostringstream d;
  d << "oracle cost " << oracle.cost << " at (" << (oracle.steiner.empty() ? NAN : oracle.steiner[0][0])
    << ", " << (oracle.steiner.empty() ? NAN : oracle.steiner[0][1]) << "), rescaled(48) "
    << last.rescaled << ", gap " << 100.0 * gap << "% (< 5%), " << runs.y_seconds << " s (< 300 s)";
  o.detail = d.str();
  return o;
}

Outcome hausdorff_trend(const Runs& runs) {
  const double diameter = terminal_diameter(y_instance());
  const SweepRecord& first = runs.y.records.front();
  const SweepRecord& last = runs.y.records.back();
  Outcome o;
  o.pass = first.n == 6 && last.n == 48 && last.hausdorff < 0.1 * diameter &&
           last.hausdorff < first.hausdorff;
  std::ostringstream d;
  d << "d(48) = " << last.hausdorff << " (< " << 0.1 * diameter << "), d(6) = " << first.hausdorff;
  o.detail = d.str();
  return o;
}

Outcome sandwich(const Runs& runs) {
  Outcome o;
  std::size_t checked = 0, violations = 0;
  for (const auto* sweep : {&runs.edge, &runs.y}) {
    const SignedConfig c = sweep == &runs.edge ? unit_edge() : y_instance();
    const double q = 2.0;
    const double N = static_cast<double>(c.atoms_per_side());
    const WeightedDigraph network = sweep->oracle.graph();
    for (const SweepRecord& rec : sweep->records) {
      if (!rec.error.empty()) {
        ++violations;
        continue;
      }
      const double n = static_cast<double>(rec.n);
      const double e = (q - 1.0) / q;
      const double holder = std::pow(n, e) * rec.wbar * std::pow((n + 2.0 * N * N * N) / n, e);
      const double upper = realized_bound(c, allocate(network, rec.n, q), q);
      if (!(sweep->oracle.cost <= holder * (1 + 1e-12))) ++violations;
      if (!(rec.wbar <= upper * (1 + 1e-12))) ++violations;
      checked += 2;
    }
  }
  o.pass = violations == 0;
  o.detail = std::to_string(checked) + " inequalities, " + std::to_string(violations) + " violations";
  return o;
}

Outcome regularization() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::size_t plans = 0, failures = 0;
  double worst_marginal = 0.0;
  for (int instance = 0; instance < 10; ++instance) {
    const std::size_t S = 1 + rng() % 3, T = 1 + rng() % 3;
    const SignedConfig c = ts::random_config(S, T, 2, rng);
    for (int k = 0; k < 20; ++k) {
      const std::size_t n = rng() % 9;
      const FreeAtoms z = ts::random_atoms(2, n, rng);
      const Embedding pos(c, z);
      const double q = k % 3 == 0 ? 1.5 : (k % 3 == 1 ? 2.0 : 3.0);
      const TransportPlan p = ts::random_feasible_plan(c, n, rng);
      const TransportPlan out = regularize(p, pos, q);
      const FeasibilityReport f = check_feasibility(out, c, 1e-9);
      worst_marginal = std::max(worst_marginal, f.worst_violation);
      const bool ok = is_regular(out).regular &&
                      ts::regular_by_path_enumeration(out, kZeroFlow * out.total_mass()) &&
                      f.feasible &&
                      ts::plan_objective(c, z, out, q) <= ts::plan_objective(c, z, p, q) * (1 + 1e-12);
      failures += ok ? 0 : 1;
      ++plans;
    }
  }
  const double elapsed = seconds_since(t0);
  Outcome o;
  o.pass = failures == 0 && elapsed < 60.0;
  std::ostringstream d;
  d << plans << " plans, " << failures << " failures, worst marginal error " << worst_marginal
    << ", " << elapsed << " s (< 60 s)";
  o.detail = d.str();
  return o;
}

Outcome gradient() {
  std::mt19937_64 rng(7);
  double worst = 0.0;
  std::size_t triples = 0;
  const double qs[] = {1.5, 2.0, 3.0};
  for (int k = 0; k < 50; ++k) {
    const double q = qs[k % 3];
    const SignedConfig c = ts::random_config(1 + rng() % 3, 1 + rng() % 3, 2, rng);
    const std::size_t n = 1 + rng() % 6;
    const FreeAtoms z = ts::random_atoms(2, n, rng);
    const TransportPlan p = regularize(ts::random_feasible_plan(c, n, rng, false), Embedding(c, z), q);
    const double scale = terminal_diameter(c);
    const auto g = grad_Z(c, z, p, q);
    const auto fd = ts::finite_difference_gradient(c, z, p, q, 1e-6 * scale);
    double diff = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < fd.size(); ++i) {
      const double a = g[i / 2][i % 2];
      diff = std::max(diff, std::abs(a - fd[i]));
      norm = std::max(norm, std::abs(fd[i]));
    }
    worst = std::max(worst, norm > 0.0 ? diff / norm : diff);
    ++triples;
  }
  Outcome o;
  o.pass = worst < 1e-5;
  std::ostringstream d;
  d << triples << " triples, worst relative error " << worst << " (< 1e-5)";
  o.detail = d.str();
  return o;
}

Outcome structure() {
  std::mt19937_64 rng(31);
  Outcome o;
  std::ostringstream d;
  std::size_t passed = 0;
  for (int k = 0; k < 5; ++k) {
    const SignedConfig c = ts::random_config(2, 2, 2, rng);
    const std::size_t n = 4 + 5 * static_cast<std::size_t>(k);  // 4, 9, 14, 19, 24
    CostParams params;
    params.seed = static_cast<std::uint64_t>(k);
    const SolveResult r = alternate_minimize(c, n, params);
    const ReducedTree t = reduce_graph(plan_to_graph(c, r.atoms, r.plan));
    const StructureReport report = verify_structure(t, c);
    if (report.all_pass()) {
      ++passed;
      continue;
    }
    o.pass = false;
    for (const StructureCheck& check : report.checks)
      if (!check.pass) d << "n=" << n << " " << check.item << ": " << check.witness << "; ";
  }
  d << passed << "/5 instances pass every structure check";
  o.detail = d.str();
  return o;
}

Outcome q_to_one() {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int k = 0; k < 5; ++k) {
    const SignedConfig c = ts::random_config(2, 2, 2, rng);
    const double w1 = wasserstein_q(c.sources, c.sinks, 1.0);
    worst = std::max(worst, std::abs(oracle(c, 1.01).cost - w1) / w1);
  }
  Outcome o;
  o.pass = worst < 0.02;
  std::ostringstream d;
  d << "worst relative difference " << 100.0 * worst << "% (< 2%)";
  o.detail = d.str();
  return o;
}

Outcome plan_exactness() {
  std::mt19937_64 rng(555);
  double worst = 0.0;
  int instances = 0;
  for (int k = 0; k < 20; ++k) {
    const std::size_t N = 1 + k % 3;
    const std::size_t n = rng() % (6 - N + 1);
    const SignedConfig c = ts::random_config(N, N, 2, rng);
    const FreeAtoms z = ts::random_atoms(2, n, rng);
    const double q = k % 2 ? 2.0 : 1.5;
    const double exact = min_cost_plan(c, z, q).cost;
    const double reference = ts::lp_vertex_minimum(c, z, q);
    worst = std::max(worst, std::abs(exact - reference) / std::max(1.0, std::abs(reference)));
    ++instances;
  }
  Outcome o;
  o.pass = worst <= 1e-9;
  std::ostringstream d;
  d << instances << " instances, worst difference " << worst << " (<= 1e-9)";
  o.detail = d.str();
  return o;
}

}  // namespace

int main() {
  bool all = true;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& run) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    all = all && o.pass;
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
  };

  Runs runs;
  bool have_runs = true;
  try {
    runs = run_sweeps();
  } catch (const std::exception& e) {
    have_runs = false;
    std::printf("sweeps failed: %s\n", e.what());
  }
  auto needs_runs = [&](std::function<Outcome(const Runs&)> f) {
    return [&, f]() {
      if (!have_runs) return Outcome{false, "sweeps did not run"};
      return f(runs);
    };
  };

  report(1, "single-edge scaling", needs_runs(single_edge));
  report(2, "Y-instance convergence", needs_runs(y_convergence));
  report(3, "Hausdorff convergence", needs_runs(hausdorff_trend));
  report(4, "sandwich bounds", needs_runs(sandwich));
  report(5, "regularization", regularization);
  report(6, "gradient check", gradient);
  report(7, "structure", structure);
  report(8, "q to 1 consistency", q_to_one);
  report(9, "min-cost plan exactness", plan_exactness);
  return all ? 0 : 1;
}
