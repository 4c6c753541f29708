#include "branched/bruteforce_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>

namespace branched {

TerminalSet required_terminals(const SignedConfig& config) {
  TerminalSet t;
  t.dimension = config.dimension;
  for (std::size_t i = 0; i < config.sources.size(); ++i) {
    if (config.sources[i].mass <= 0.0) continue;
    t.positions.push_back(config.sources[i].position);
    t.net_mass.push_back(config.sources[i].mass);
    t.origin.push_back({Side::Source, i});
  }
  for (std::size_t j = 0; j < config.sinks.size(); ++j) {
    if (config.sinks[j].mass <= 0.0) continue;
    t.positions.push_back(config.sinks[j].position);
    t.net_mass.push_back(-config.sinks[j].mass);
    t.origin.push_back({Side::Sink, j});
  }
  return t;
}

namespace {

using EdgeList = std::vector<std::pair<std::size_t, std::size_t>>;

EdgeList decode_pruefer(const std::vector<std::size_t>& seq, std::size_t vertices) {
  std::vector<std::size_t> degree(vertices, 1);
  for (std::size_t x : seq) ++degree[x];
  EdgeList edges;
  for (std::size_t x : seq) {
    std::size_t leaf = 0;
    while (degree[leaf] != 1) ++leaf;
    edges.emplace_back(std::min(leaf, x), std::max(leaf, x));
    --degree[leaf];
    --degree[x];
  }
  std::size_t u = vertices, v = vertices;
  for (std::size_t k = 0; k < vertices; ++k) {
    if (degree[k] != 1) continue;
    (u == vertices ? u : v) = k;
  }
  edges.emplace_back(u, v);
  return edges;
}

EdgeList canonical(const EdgeList& edges, std::size_t terminals, std::size_t steiner) {
  std::vector<std::size_t> perm(steiner);
  std::iota(perm.begin(), perm.end(), terminals);
  EdgeList best;
  do {
    EdgeList mapped;
    mapped.reserve(edges.size());
    for (auto [a, b] : edges) {
      const std::size_t x = a >= terminals ? perm[a - terminals] : a;
      const std::size_t y = b >= terminals ? perm[b - terminals] : b;
      mapped.emplace_back(std::min(x, y), std::max(x, y));
    }
    std::sort(mapped.begin(), mapped.end());
    if (best.empty() || mapped < best) best = std::move(mapped);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Mass carried along each edge, oriented first -> second.
std::vector<double> tree_flows(const EdgeList& edges, std::size_t vertices,
                               const std::vector<double>& net_mass) {
  std::vector<std::vector<std::size_t>> incident(vertices);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    incident[edges[e].first].push_back(e);
    incident[edges[e].second].push_back(e);
  }
  std::vector<std::size_t> order{0}, parent_edge(vertices, edges.size());
  std::vector<char> seen(vertices, 0);
  seen[0] = 1;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t u = order[k];
    for (std::size_t e : incident[u]) {
      const std::size_t v = edges[e].first == u ? edges[e].second : edges[e].first;
      if (seen[v]) continue;
      seen[v] = 1;
      parent_edge[v] = e;
      order.push_back(v);
    }
  }
  std::vector<double> subtree(vertices, 0.0);
  for (std::size_t v = 0; v < net_mass.size(); ++v) subtree[v] = net_mass[v];
  std::vector<double> flows(edges.size(), 0.0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const std::size_t v = *it;
    if (v == 0) continue;
    const std::size_t e = parent_edge[v];
    const std::size_t p = edges[e].first == v ? edges[e].second : edges[e].first;
    flows[e] = edges[e].first == v ? subtree[v] : -subtree[v];
    subtree[p] += subtree[v];
  }
  return flows;
}

}  // namespace

std::vector<Topology> enumerate_topologies(const SignedConfig& config, std::size_t s_max,
                                           std::size_t cap) {
  const TerminalSet terminals = required_terminals(config);
  const std::size_t T = terminals.size();
  if (T < 2) throw std::invalid_argument("need at least two positive-mass terminals");
  s_max = std::min(s_max, T - 2);

  std::vector<Topology> out;
  std::set<EdgeList> seen;
  std::size_t visited = 0;
  const std::size_t visit_cap = 100 * cap;

  auto emit = [&](const EdgeList& edges, std::size_t s) {
    EdgeList key = canonical(edges, T, s);
    if (!seen.insert(key).second) return;
    if (out.size() >= cap) throw OracleBudgetError("topology enumeration exceeded its budget");
    Topology t;
    t.terminals = T;
    t.steiner = s;
    t.flows = tree_flows(key, T + s, terminals.net_mass);
    t.edges = std::move(key);
    out.push_back(std::move(t));
  };

  for (std::size_t s = 0; s <= s_max; ++s) {
    const std::size_t V = T + s;
    if (V == 2) {
      emit({{0, 1}}, 0);
      continue;
    }
    // Pruefer sequences of length V-2 where each Steiner label appears at
    // least twice (degree >= 3).
    std::vector<std::size_t> seq(V - 2);
    std::vector<std::size_t> count(V, 0);
    std::function<void(std::size_t)> fill = [&](std::size_t pos) {
      std::size_t missing = 0;
      for (std::size_t k = T; k < V; ++k) missing += count[k] < 2 ? 2 - count[k] : 0;
      if (missing > seq.size() - pos) return;
      if (pos == seq.size()) {
        if (++visited > visit_cap)
          throw OracleBudgetError("topology enumeration exceeded its budget");
        emit(decode_pruefer(seq, V), s);
        return;
      }
      for (std::size_t label = 0; label < V; ++label) {
        seq[pos] = label;
        ++count[label];
        fill(pos + 1);
        --count[label];
      }
    };
    fill(0);
  }
  return out;
}

TopologySolution solve_topology(const Topology& t, const TerminalSet& terminals, double q) {
  const std::size_t T = t.terminals;
  const std::size_t V = T + t.steiner;
  const std::size_t dim = terminals.dimension;
  const double mass = std::accumulate(terminals.net_mass.begin(), terminals.net_mass.end(), 0.0,
                                      [](double s, double m) { return s + std::max(m, 0.0); });

  std::vector<double> weight(t.edges.size(), 0.0);
  double weight_sum = 0.0;
  for (std::size_t e = 0; e < t.edges.size(); ++e) {
    if (std::abs(t.flows[e]) > 1e-12 * mass) weight[e] = std::pow(std::abs(t.flows[e]), 1.0 / q);
    weight_sum += weight[e];
  }

  std::vector<Point> pos(V, Point(dim, 0.0));
  Point centroid(dim, 0.0);
  double scale = 0.0;
  for (std::size_t v = 0; v < T; ++v) {
    pos[v] = terminals.positions[v];
    for (std::size_t d = 0; d < dim; ++d) centroid[d] += pos[v][d] / static_cast<double>(T);
    for (std::size_t u = 0; u < v; ++u) scale = std::max(scale, distance(pos[u], pos[v]));
  }
  if (scale == 0.0) scale = 1.0;

  std::vector<std::vector<std::size_t>> incident(V);
  for (std::size_t e = 0; e < t.edges.size(); ++e) {
    incident[t.edges[e].first].push_back(e);
    incident[t.edges[e].second].push_back(e);
  }
  auto other = [&](std::size_t e, std::size_t v) {
    return t.edges[e].first == v ? t.edges[e].second : t.edges[e].first;
  };

  // Start each Steiner point near the mean of its terminal neighbours,
  // offset deterministically so no two start on top of each other.
  for (std::size_t s = T; s < V; ++s) {
    Point p(dim, 0.0);
    std::size_t k = 0;
    for (std::size_t e : incident[s]) {
      const std::size_t o = other(e, s);
      if (o >= T) continue;
      for (std::size_t d = 0; d < dim; ++d) p[d] += pos[o][d];
      ++k;
    }
    for (std::size_t d = 0; d < dim; ++d) {
      p[d] = k > 0 ? p[d] / static_cast<double>(k) : centroid[d];
      p[d] += 1e-3 * scale * std::sin(1.0 + 7.0 * static_cast<double>(s) + 3.0 * static_cast<double>(d));
    }
    pos[s] = p;
  }

  const double coincident = 1e-10 * scale;
  const double tolerance = 1e-9 * std::max(weight_sum, 1e-300);
  const std::size_t max_sweeps = 200000;

  // Norm of the minimal subgradient at Steiner point s.
  auto stationarity = [&](std::size_t s, Point& direction) {
    direction.assign(dim, 0.0);
    double stuck = 0.0;
    for (std::size_t e : incident[s]) {
      if (weight[e] == 0.0) continue;
      const std::size_t o = other(e, s);
      const double r = distance(pos[s], pos[o]);
      if (r <= coincident) {
        stuck += weight[e];
        continue;
      }
      for (std::size_t d = 0; d < dim; ++d) direction[d] += weight[e] * (pos[s][d] - pos[o][d]) / r;
    }
    double norm = 0.0;
    for (double x : direction) norm += x * x;
    norm = std::sqrt(norm);
    return std::pair{std::max(0.0, norm - stuck), stuck > 0.0};
  };

  TopologySolution out;
  Point direction;
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    double worst = 0.0;
    for (std::size_t s = T; s < V; ++s) {
      auto [g, stuck] = stationarity(s, direction);
      worst = std::max(worst, g);
      if (stuck && g > tolerance) {
        // Sitting on a neighbour that is not optimal; step off downhill.
        double norm = 0.0;
        for (double x : direction) norm += x * x;
        norm = std::sqrt(norm);
        for (std::size_t d = 0; d < dim; ++d) pos[s][d] -= 1e-6 * scale * direction[d] / norm;
      }
    }
    out.stationarity = worst;
    out.iterations = sweep;
    if (worst <= tolerance) {
      out.converged = true;
      break;
    }
    for (std::size_t s = T; s < V; ++s) {
      Point num(dim, 0.0);
      double den = 0.0;
      for (std::size_t e : incident[s]) {
        if (weight[e] == 0.0) continue;
        const std::size_t o = other(e, s);
        const double r = std::max(distance(pos[s], pos[o]), 1e-3 * coincident);
        const double c = weight[e] / r;
        for (std::size_t d = 0; d < dim; ++d) num[d] += c * pos[o][d];
        den += c;
      }
      if (den > 0.0)
        for (std::size_t d = 0; d < dim; ++d) pos[s][d] = num[d] / den;
    }
  }

  for (std::size_t e = 0; e < t.edges.size(); ++e)
    out.cost += weight[e] * distance(pos[t.edges[e].first], pos[t.edges[e].second]);
  out.steiner.assign(pos.begin() + static_cast<std::ptrdiff_t>(T), pos.end());
  return out;
}

OracleSolution oracle(const SignedConfig& config, double q, std::optional<std::size_t> s_max) {
  require_branching_exponent(q);
  const std::size_t N = config.atoms_per_side();
  const std::size_t budget = s_max.value_or(2 * N >= 2 ? 2 * N - 2 : 0);
  const std::vector<Topology> topologies = enumerate_topologies(config, budget);

  OracleSolution best;
  best.q = q;
  best.terminals = required_terminals(config);
  std::vector<TopologySolution> solved;
  solved.reserve(topologies.size());
  for (std::size_t k = 0; k < topologies.size(); ++k) {
    solved.push_back(solve_topology(topologies[k], best.terminals, q));
    best.table.push_back({k, solved.back().cost, solved.back().converged});
  }
  std::stable_sort(best.table.begin(), best.table.end(),
                   [](const RankedTopology& a, const RankedTopology& b) { return a.cost < b.cost; });
  const std::size_t winner = best.table.front().topology;
  best.topology = topologies[winner];
  best.steiner = solved[winner].steiner;
  best.cost = solved[winner].cost;
  return best;
}

WeightedDigraph OracleSolution::graph() const {
  const std::size_t T = topology.terminals;
  const std::size_t V = T + topology.steiner;
  const double mass = std::accumulate(terminals.net_mass.begin(), terminals.net_mass.end(), 0.0,
                                      [](double s, double m) { return s + std::max(m, 0.0); });
  std::vector<Point> pos(terminals.positions);
  pos.insert(pos.end(), steiner.begin(), steiner.end());

  // Union Steiner points into whatever they coincide with.
  std::vector<std::size_t> rep(V);
  std::iota(rep.begin(), rep.end(), 0);
  auto find = [&](std::size_t v) {
    while (rep[v] != v) v = rep[v];
    return v;
  };
  for (auto [a, b] : topology.edges) {
    if (a < T && b < T) continue;
    if (distance(pos[a], pos[b]) >= 1e-9) continue;
    const std::size_t ra = find(a), rb = find(b);
    if (ra == rb) continue;
    // keep terminals as representatives
    if (ra < rb) rep[rb] = ra; else rep[ra] = rb;
  }

  WeightedDigraph g;
  g.dimension = terminals.dimension;
  std::vector<std::size_t> vertex_of(V, V);
  std::vector<char> used(V, 0);
  for (std::size_t e = 0; e < topology.edges.size(); ++e) {
    if (std::abs(topology.flows[e]) <= 1e-12 * mass) continue;
    const std::size_t a = find(topology.edges[e].first), b = find(topology.edges[e].second);
    if (a != b) used[a] = used[b] = 1;
  }
  for (std::size_t v = 0; v < V; ++v) {
    if (find(v) != v || (v >= T && !used[v])) continue;
    Vertex vx;
    vx.position = pos[v];
    if (v < T) {
      vx.role = terminals.origin[v].side == Side::Source ? VertexRole::Source : VertexRole::Sink;
      vx.index = terminals.origin[v].index;
    } else {
      vx.role = VertexRole::Free;
      vx.index = v - T;
    }
    vertex_of[v] = g.vertices.size();
    g.vertices.push_back(std::move(vx));
  }
  for (std::size_t e = 0; e < topology.edges.size(); ++e) {
    const double f = topology.flows[e];
    if (std::abs(f) <= 1e-12 * mass) continue;
    std::size_t a = find(topology.edges[e].first), b = find(topology.edges[e].second);
    if (a == b) continue;
    if (f < 0.0) std::swap(a, b);
    g.edges.push_back({vertex_of[a], vertex_of[b], std::abs(f), distance(pos[a], pos[b])});
  }
  return g;
}

}  // namespace branched
