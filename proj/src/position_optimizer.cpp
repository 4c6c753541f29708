#include "branched/position_optimizer.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "branched/atom_allocator.hpp"
#include "branched/plan_regularizer.hpp"

namespace branched {
namespace {

double objective(const SignedConfig& config, const FreeAtoms& z, const TransportPlan& plan,
                 double q) {
  return plan_cost(plan, Embedding(config, z), q);
}

std::vector<char> active_atoms(const TransportPlan& plan) {
  const NodeLayout& l = plan.layout();
  const double threshold = kZeroFlow * plan.total_mass();
  std::vector<char> active(l.free(), 0);
  for (const auto& [arc, g] : plan.entries()) {
    if (g <= threshold) continue;
    if (l.role(arc.first) == NodeRole::Free) active[l.local(arc.first)] = 1;
    if (l.role(arc.second) == NodeRole::Free) active[l.local(arc.second)] = 1;
  }
  return active;
}

struct Derivatives {
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

// Gradient and Hessian over the active atoms; `slot[k]` is atom k's block
// index or -1.
Derivatives derivatives(const Embedding& pos, const TransportPlan& plan, double q,
                        const std::vector<int>& slot, int blocks, double min_length) {
  const std::size_t dim = pos.dimension();
  const NodeLayout& l = plan.layout();
  Derivatives out;
  out.gradient = Eigen::VectorXd::Zero(blocks * static_cast<int>(dim));
  out.hessian = Eigen::MatrixXd::Zero(out.gradient.size(), out.gradient.size());
  auto block = [&](NodeId v) {
    return l.role(v) == NodeRole::Free ? slot[l.local(v)] : -1;
  };

  Eigen::VectorXd d(dim);
  Eigen::MatrixXd h(dim, dim);
  for (const auto& [arc, g] : plan.entries()) {
    const int bu = block(arc.first);
    const int bv = block(arc.second);
    if (bu < 0 && bv < 0) continue;
    const auto pu = pos[arc.first];
    const auto pv = pos[arc.second];
    for (std::size_t k = 0; k < dim; ++k) d[k] = pu[k] - pv[k];
    const double r = d.norm();
    if (r > 0.0) {
      const Eigen::VectorXd gd = g * q * std::pow(r, q - 2.0) * d;
      if (bu >= 0) out.gradient.segment(bu * dim, dim) += gd;
      if (bv >= 0) out.gradient.segment(bv * dim, dim) -= gd;
    }
    const double re = std::max(r, min_length);
    h = Eigen::MatrixXd::Identity(dim, dim);
    if (r > 0.0) h += (q - 2.0) * d * d.transpose() / (r * r);
    h *= g * q * std::pow(re, q - 2.0);
    if (bu >= 0) out.hessian.block(bu * dim, bu * dim, dim, dim) += h;
    if (bv >= 0) out.hessian.block(bv * dim, bv * dim, dim, dim) += h;
    if (bu >= 0 && bv >= 0) {
      out.hessian.block(bu * dim, bv * dim, dim, dim) -= h;
      out.hessian.block(bv * dim, bu * dim, dim, dim) -= h;
    }
  }
  return out;
}

FreeAtoms step(const FreeAtoms& z, const std::vector<int>& slot, const Eigen::VectorXd& p,
               double alpha) {
  FreeAtoms next = z;
  const std::size_t dim = z.dimension();
  for (std::size_t k = 0; k < z.size(); ++k) {
    if (slot[k] < 0) continue;
    for (std::size_t c = 0; c < dim; ++c) next[k][c] += alpha * p[slot[k] * dim + c];
  }
  return next;
}

double length_scale(const SignedConfig& config) {
  const double d = terminal_diameter(config);
  return d > 0.0 ? d : 1.0;
}

std::vector<std::size_t> unused_atoms(const TransportPlan& plan) {
  const auto active = active_atoms(plan);
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < active.size(); ++k)
    if (!active[k]) out.push_back(k);
  return out;
}

// Moves idle atoms onto the plan's costliest arcs, greedily by the cost
// saved if that arc were split once more. The plan cost is unchanged.
void reseed_unused(FreeAtoms& z, const SignedConfig& config, const TransportPlan& plan,
                   const std::vector<std::size_t>& unused, double q) {
  const Embedding pos(config, z);
  struct Candidate {
    NodeId from, to;
    double cost;
    std::size_t splits = 0;
  };
  std::vector<Candidate> arcs;
  for (const auto& [arc, g] : plan.entries())
    arcs.push_back({arc.first, arc.second, g * arc_cost(pos, arc.first, arc.second, q)});
  if (arcs.empty()) return;

  auto gain = [q](const Candidate& c) {
    const double k = static_cast<double>(c.splits);
    return c.cost * (std::pow(k + 1.0, 1.0 - q) - std::pow(k + 2.0, 1.0 - q));
  };
  for (std::size_t u = 0; u < unused.size(); ++u) {
    std::size_t best = 0;
    for (std::size_t a = 1; a < arcs.size(); ++a)
      if (gain(arcs[a]) > gain(arcs[best])) best = a;
    ++arcs[best].splits;
  }
  std::size_t next = 0;
  for (const Candidate& c : arcs) {
    for (std::size_t l = 1; l <= c.splits; ++l) {
      const double t = static_cast<double>(l) / static_cast<double>(c.splits + 1);
      auto target = z[unused[next++]];
      for (std::size_t d = 0; d < z.dimension(); ++d)
        target[d] = pos[c.from][d] + t * (pos[c.to][d] - pos[c.from][d]);
    }
  }
}

}  // namespace

std::vector<Point> grad_Z(const SignedConfig& config, const FreeAtoms& atoms,
                          const TransportPlan& plan, double q) {
  const Embedding pos(config, atoms);
  const NodeLayout& l = plan.layout();
  const std::size_t dim = config.dimension;
  std::vector<Point> grad(atoms.size(), Point(dim, 0.0));
  Point d(dim);
  for (const auto& [arc, g] : plan.entries()) {
    const auto pu = pos[arc.first];
    const auto pv = pos[arc.second];
    for (std::size_t k = 0; k < dim; ++k) d[k] = pu[k] - pv[k];
    const double r = distance(pu, pv);
    if (r == 0.0) continue;
    const double c = g * q * std::pow(r, q - 2.0);
    if (l.role(arc.first) == NodeRole::Free)
      for (std::size_t k = 0; k < dim; ++k) grad[l.local(arc.first)][k] += c * d[k];
    if (l.role(arc.second) == NodeRole::Free)
      for (std::size_t k = 0; k < dim; ++k) grad[l.local(arc.second)][k] -= c * d[k];
  }
  return grad;
}

PositionResult optimize_positions(const SignedConfig& config, const TransportPlan& plan,
                                  FreeAtoms start, const CostParams& params) {
  const double q = params.q;
  require_branching_exponent(q);
  const auto active = active_atoms(plan);
  std::vector<int> slot(start.size(), -1);
  int blocks = 0;
  for (std::size_t k = 0; k < start.size(); ++k)
    if (active[k]) slot[k] = blocks++;

  const double scale = length_scale(config);
  const double grad_tol = params.position_tolerance * plan.total_mass() * std::pow(scale, q - 1.0);
  const double min_length = 1e-9 * scale;

  PositionResult out;
  out.atoms = std::move(start);
  out.cost = objective(config, out.atoms, plan, q);
  if (blocks == 0) {
    out.converged = true;
    return out;
  }

  for (;;) {
    const Derivatives der =
        derivatives(Embedding(config, out.atoms), plan, q, slot, blocks, min_length);
    out.grad_norm = der.gradient.lpNorm<Eigen::Infinity>();
    if (out.grad_norm <= grad_tol) {
      out.converged = true;
      return out;
    }
    if (out.iterations >= params.position_iterations) return out;
    ++out.iterations;

    const double diag = std::max(der.hessian.diagonal().maxCoeff(), 1e-300);
    Eigen::MatrixXd regularized = der.hessian;
    regularized.diagonal().array() += 1e-12 * diag;
    Eigen::VectorXd newton = regularized.ldlt().solve(-der.gradient);

    bool moved = false;
    for (int attempt = 0; attempt < 2 && !moved; ++attempt) {
      Eigen::VectorXd p = attempt == 0 ? newton : Eigen::VectorXd(-der.gradient / diag);
      const double slope = der.gradient.dot(p);
      if (!p.allFinite() || !(slope < 0.0)) continue;
      double alpha = 1.0;
      for (int halving = 0; halving < 60; ++halving, alpha *= 0.5) {
        FreeAtoms trial = step(out.atoms, slot, p, alpha);
        const double f = objective(config, trial, plan, q);
        if (f <= out.cost + params.armijo * alpha * slope) {
          moved = f < out.cost || alpha * p.lpNorm<Eigen::Infinity>() > 0.0;
          out.atoms = std::move(trial);
          out.cost = std::min(out.cost, f);
          break;
        }
      }
    }
    if (!moved) return out;  // stalled at floating-point resolution
  }
}

FreeAtoms matching_seed(const SignedConfig& config, std::size_t n, double q) {
  FreeAtoms z(config.dimension, n);
  if (n == 0) return z;
  const Embedding terminals(config, FreeAtoms(config.dimension, 0));
  const TransportPlan matching = min_cost_plan(config, FreeAtoms(config.dimension, 0), 1.0).plan;

  struct Segment {
    NodeId from, to;
    double weight;
  };
  std::vector<Segment> segments;
  for (const auto& [arc, g] : matching.entries()) {
    const double len = distance(terminals[arc.first], terminals[arc.second]);
    if (len > 0.0) segments.push_back({arc.first, arc.second, std::pow(g, 1.0 / q) * len});
  }
  if (segments.empty()) {
    for (std::size_t k = 0; k < n; ++k) {
      const auto p = terminals[0];
      std::copy(p.begin(), p.end(), z[k].begin());
    }
    return z;
  }

  std::vector<std::size_t> counts(segments.size(), 0);
  if (n >= segments.size()) {
    std::vector<double> w;
    for (const Segment& s : segments) w.push_back(s.weight);
    counts = largest_remainder(w, n, true);
  } else {
    std::vector<std::size_t> order(segments.size());
    for (std::size_t s = 0; s < order.size(); ++s) order[s] = s;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return segments[a].weight > segments[b].weight;
    });
    for (std::size_t k = 0; k < n; ++k) counts[order[k]] = 1;
  }

  std::size_t next = 0;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const auto a = terminals[segments[s].from];
    const auto b = terminals[segments[s].to];
    for (std::size_t l = 1; l <= counts[s]; ++l) {
      const double t = static_cast<double>(l) / static_cast<double>(counts[s] + 1);
      for (std::size_t d = 0; d < config.dimension; ++d) z[next][d] = a[d] + t * (b[d] - a[d]);
      ++next;
    }
  }
  return z;
}

FreeAtoms random_seed(const SignedConfig& config, std::size_t n, std::mt19937_64& rng) {
  const BoundingBox box = terminal_box(config);
  FreeAtoms z(config.dimension, n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t d = 0; d < config.dimension; ++d)
      z[k][d] = box.lo[d] + unit(rng) * (box.hi[d] - box.lo[d]);
  return z;
}

SolveResult alternate_from(const SignedConfig& config, FreeAtoms start, const CostParams& params) {
  const double q = params.q;
  SolveResult res;
  res.n = start.size();
  res.q = q;

  constexpr double kSlack = 1e-12;
  FreeAtoms z = std::move(start);
  double previous = std::numeric_limits<double>::infinity();
  std::size_t stalled = 0;
  bool settled = false;
  bool positions_converged = false;
  for (std::size_t round = 1; round <= params.max_rounds; ++round) {
    const PlanSolution solved = min_cost_plan(config, z, q);
    if (solved.cost > previous * (1.0 + kSlack)) res.monotone = false;
    const Embedding pos(config, z);
    TransportPlan plan = regularize(solved.plan, pos, q);
    const double regular_cost = plan_cost(plan, pos, q);
    if (regular_cost > solved.cost * (1.0 + kSlack)) res.monotone = false;

    PositionResult moved = optimize_positions(config, plan, z, params);
    if (moved.cost > regular_cost * (1.0 + kSlack)) res.monotone = false;
    positions_converged = moved.converged;

    res.rounds = round;
    res.atoms = moved.atoms;
    res.plan = std::move(plan);
    res.cost_q = moved.cost;
    res.unused_atoms = unused_atoms(res.plan);

    const double decrease = previous - moved.cost;
    previous = moved.cost;
    z = std::move(moved.atoms);
    if (!res.unused_atoms.empty()) reseed_unused(z, config, res.plan, res.unused_atoms, q);
    if (decrease <= params.round_tolerance * moved.cost) {
      if (res.unused_atoms.empty() || ++stalled >= 2) {
        settled = true;
        break;
      }
    } else {
      stalled = 0;
    }
  }
  res.converged = settled && positions_converged;
  res.wbar = std::pow(std::max(res.cost_q, 0.0), 1.0 / q);
  res.rescaled = std::pow(static_cast<double>(res.n), 1.0 - 1.0 / q) * res.wbar;
  return res;
}

SolveResult alternate_minimize(const SignedConfig& config, std::size_t n, const CostParams& params,
                               const std::vector<FreeAtoms>& extra_starts) {
  require_branching_exponent(params.q);
  if (n == 0) {
    const PlanSolution direct = min_cost_plan(config, FreeAtoms(config.dimension, 0), params.q);
    SolveResult res;
    res.q = params.q;
    res.atoms = FreeAtoms(config.dimension, 0);
    res.plan = direct.plan;
    res.cost_q = direct.cost;
    res.wbar = std::pow(direct.cost, 1.0 / params.q);
    res.rescaled = 0.0;
    res.converged = true;
    res.start_costs = {direct.cost};
    return res;
  }

  std::vector<FreeAtoms> starts;
  starts.push_back(matching_seed(config, n, params.q));
  for (const FreeAtoms& extra : extra_starts) {
    if (extra.size() != n || extra.dimension() != config.dimension)
      throw std::invalid_argument("extra start does not match n or dimension");
    starts.push_back(extra);
  }
  for (std::size_t r = 0; r < params.restarts; ++r) {
    std::seed_seq seq{static_cast<std::uint32_t>(params.seed), static_cast<std::uint32_t>(params.seed >> 32),
                      static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(seq);
    starts.push_back(random_seed(config, n, rng));
  }

  SolveResult best;
  std::vector<double> costs;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    SolveResult res = alternate_from(config, std::move(starts[s]), params);
    costs.push_back(res.cost_q);
    if (s == 0 || res.cost_q < best.cost_q) {
      best = std::move(res);
      best.best_start = s;
    }
  }
  best.start_costs = std::move(costs);
  return best;
}

}  // namespace branched
