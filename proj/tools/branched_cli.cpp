#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "branched/atom_allocator.hpp"
#include "branched/bruteforce_oracle.hpp"
#include "branched/hausdorff.hpp"
#include "branched/io.hpp"
#include "branched/network_extract.hpp"
#include "branched/position_optimizer.hpp"
#include "branched/render.hpp"
#include "branched/sweep.hpp"

namespace fs = std::filesystem;
using namespace branched;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 2;
constexpr int kNotConverged = 3;

struct Globals {
  std::uint64_t seed = 0;
  std::optional<double> q;
  fs::path out_dir = "out";
  std::size_t restarts = 8;
};

CostParams params_for(const Globals& g, const Problem& p) {
  CostParams params;
  params.q = g.q.value_or(p.q);
  params.seed = g.seed;
  params.restarts = g.restarts;
  return params;
}

Problem load(const std::string& path, const Globals& g) {
  Problem p = load_problem(path);
  if (g.q) p.q = *g.q;
  require_branching_exponent(p.q);
  return p;
}

void write_json(const fs::path& path, const Json& j) { write_atomically(path, j.dump(2) + "\n"); }

void write_svg(const fs::path& path, const WeightedDigraph& g, double q, const std::string& title) {
  if (g.dimension != 2 || g.vertices.empty()) return;
  std::ostringstream svg;
  RenderOptions options;
  options.q = q;
  options.title = title;
  render_svg(svg, g, options);
  write_atomically(path, svg.str());
}

WeightedDigraph solution_tree(const SignedConfig& config, const SolveResult& r) {
  return reduce_graph(plan_to_graph(config, r.atoms, r.plan)).graph;
}

int cmd_validate(const std::string& path, const Globals& g) {
  const Problem p = load(path, g);
  std::cout << "ok: dimension " << p.config.dimension << ", " << p.config.sources.size()
            << " sources, " << p.config.sinks.size() << " sinks, mass " << total_mass(p.config)
            << ", q " << p.q << "\n";
  for (const AtomRef& z : zero_mass_atoms(p.config))
    std::cout << "note: zero-mass " << (z.side == Side::Source ? "source " : "sink ") << z.index
              << " is not a required terminal\n";
  return kOk;
}

int cmd_solve(const std::string& path, std::size_t n, const Globals& g) {
  const Problem p = load(path, g);
  const CostParams params = params_for(g, p);
  const SolveResult r = alternate_minimize(p.config, n, params);
  Json report = to_json(r);
  if (n > 0) {
    const WeightedDigraph tree = solution_tree(p.config, r);
    report["tree"] = to_json(tree);
    write_svg(g.out_dir / ("solve_n" + std::to_string(n) + ".svg"), tree, params.q,
              "n = " + std::to_string(n));
  }
  write_json(g.out_dir / ("solve_n" + std::to_string(n) + ".json"), report);
  std::cout << "n " << n << "  cost " << r.cost_q << "  wbar " << r.wbar << "  rescaled "
            << r.rescaled << (r.converged ? "" : "  (not converged)") << "\n";
  return r.converged ? kOk : kNotConverged;
}

int cmd_oracle(const std::string& path, std::optional<std::size_t> steiner, const Globals& g) {
  const Problem p = load(path, g);
  const OracleSolution o = oracle(p.config, p.q, steiner);
  write_json(g.out_dir / "oracle.json", to_json(o));
  write_svg(g.out_dir / "oracle.svg", o.graph(), p.q, "oracle");
  std::cout << "cost " << o.cost << " over " << o.table.size() << " topologies\n";
  for (const Point& s : o.steiner) {
    std::cout << "steiner";
    for (double x : s) std::cout << ' ' << x;
    std::cout << "\n";
  }
  const bool converged = !o.table.empty() && o.table.front().converged;
  return converged ? kOk : kNotConverged;
}

int cmd_sweep(const std::string& path, const std::vector<std::size_t>& ns, bool keep,
              const Globals& g) {
  const Problem p = load(path, g);
  SweepOptions options;
  options.ns = ns;
  options.params = params_for(g, p);
  options.keep_solutions = true;
  const SweepResult result = run_sweep(p.config, options);

  write_json(g.out_dir / "oracle.json", to_json(result.oracle));
  write_svg(g.out_dir / "oracle.svg", result.oracle.graph(), p.q, "oracle");
  bool all_converged = true;
  for (const SweepRecord& r : result.records) {
    const std::string stem = "sweep_n" + std::to_string(r.n);
    Json j = to_json(r);
    if (!keep) j.erase("solution");
    write_json(g.out_dir / (stem + ".json"), j);
    if (r.solution && r.n > 0)
      write_svg(g.out_dir / (stem + ".svg"), solution_tree(p.config, *r.solution), p.q,
                "n = " + std::to_string(r.n));
    all_converged = all_converged && r.error.empty() && r.converged;
    if (!r.error.empty()) std::cerr << "n " << r.n << ": " << r.error << "\n";
  }
  std::ostringstream csv;
  write_sweep_csv(csv, result.records);
  write_atomically(g.out_dir / "sweep.csv", csv.str());
  std::cout << csv.str();
  return all_converged ? kOk : kNotConverged;
}

int cmd_render(const std::string& input, const std::string& output, double q) {
  std::ifstream in(input);
  if (!in) throw ValidationError("cannot open " + input);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw ValidationError("cannot parse " + input + ": " + e.what());
  }
  // Accept a bare graph or any report carrying one.
  const Json* graph = &j;
  if (j.contains("tree")) graph = &j.at("tree");
  else if (j.contains("graph")) graph = &j.at("graph");
  WeightedDigraph g;
  try {
    g = graph_from_json(*graph);
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("not a graph: ") + e.what());
  }
  if (g.dimension != 2) throw ValidationError("only planar graphs can be rendered");
  std::ostringstream svg;
  RenderOptions options;
  options.q = q;
  render_svg(svg, g, options);
  write_atomically(output, svg.str());
  return kOk;
}

int cmd_compare(const std::string& path, std::size_t n, const Globals& g) {
  const Problem p = load(path, g);
  const CostParams params = params_for(g, p);
  const OracleSolution o = oracle(p.config, p.q);
  const WeightedDigraph network = o.graph();
  std::vector<FreeAtoms> extra;
  if (n > 0 && n >= network.edges.size())
    extra.push_back(allocate(network, n, p.q).free_atoms(p.config.dimension));
  const SolveResult r = alternate_minimize(p.config, n, params, extra);
  Json report = {{"n", n},
                 {"limit", o.cost},
                 {"rescaled", r.rescaled},
                 {"relative_gap", (o.cost - r.rescaled) / o.cost},
                 {"upper", rescaled_upper_bound(p.config, network, n, p.q)},
                 {"lower", rescaled_lower_bound(o.cost, p.config.atoms_per_side(), n, p.q)}};
  if (!std::isfinite(report["upper"].get<double>())) report["upper"] = nullptr;
  if (n > 0) {
    const WeightedDigraph tree = solution_tree(p.config, r);
    const double d = hausdorff(tree, network, 1e-4 * terminal_diameter(p.config));
    report["hausdorff"] = d;
    report["hausdorff_over_diameter"] = d / terminal_diameter(p.config);
  }
  report["solution"] = to_json(r);
  report["oracle"] = to_json(o);
  write_json(g.out_dir / ("compare_n" + std::to_string(n) + ".json"), report);
  std::cout << "limit " << o.cost << "  rescaled " << r.rescaled << "  gap "
            << report["relative_gap"].get<double>() * 100.0 << "%";
  if (report.contains("hausdorff")) std::cout << "  hausdorff " << report["hausdorff"].get<double>();
  std::cout << "\n";
  return r.converged ? kOk : kNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate branched transport networks with atomic measures"};
  app.require_subcommand(1);
  Globals g;
  double q_flag = 0.0;
  auto* q_opt = app.add_option("--q", q_flag, "Exponent q > 1 (overrides the problem file)");
  app.add_option("--seed", g.seed, "Seed for all random starts");
  app.add_option("--out-dir", g.out_dir, "Directory for reports and drawings");
  app.add_option("--restarts", g.restarts, "Random restarts per solve");

  std::string problem;
  std::size_t n = 0;

  auto* validate_cmd = app.add_subcommand("validate", "Check a problem file");
  validate_cmd->add_option("problem", problem, "Problem JSON")->required();

  auto* solve_cmd = app.add_subcommand("solve", "Best n-atom approximation");
  solve_cmd->add_option("problem", problem, "Problem JSON")->required();
  solve_cmd->add_option("-n,--atoms", n, "Number of free atoms")->required();

  std::optional<std::size_t> steiner;
  auto* oracle_cmd = app.add_subcommand("oracle", "Exact branched network by topology enumeration");
  oracle_cmd->add_option("problem", problem, "Problem JSON")->required();
  oracle_cmd->add_option("--steiner", steiner, "Largest number of Steiner points");

  std::vector<std::size_t> ns;
  bool keep = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "Solve for several n and compare with the oracle");
  sweep_cmd->add_option("problem", problem, "Problem JSON")->required();
  sweep_cmd->add_option("-n,--atoms", ns, "Atom counts")->required()->delimiter(',');
  sweep_cmd->add_flag("--keep-solutions", keep, "Include atoms and plans in per-n reports");

  std::string input, output = "graph.svg";
  auto* render_cmd = app.add_subcommand("render", "Draw a graph JSON as SVG");
  render_cmd->add_option("input", input, "Graph or report JSON")->required();
  render_cmd->add_option("-o,--output", output, "SVG path");

  auto* compare_cmd = app.add_subcommand("compare", "One solve against the oracle");
  compare_cmd->add_option("problem", problem, "Problem JSON")->required();
  compare_cmd->add_option("-n,--atoms", n, "Number of free atoms")->required();

  CLI11_PARSE(app, argc, argv);
  if (q_opt->count() > 0) g.q = q_flag;

  try {
    if (*validate_cmd) return cmd_validate(problem, g);
    if (*solve_cmd) return cmd_solve(problem, n, g);
    if (*oracle_cmd) return cmd_oracle(problem, steiner, g);
    if (*sweep_cmd) return cmd_sweep(problem, ns, keep, g);
    if (*render_cmd) return cmd_render(input, output, g.q.value_or(2.0));
    if (*compare_cmd) return cmd_compare(problem, n, g);
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalid;
  } catch (const SolverError& e) {
    std::cerr << "solver failed after " << e.iterations() << " iterations: " << e.what() << "\n";
    return kNotConverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kOk;
}
