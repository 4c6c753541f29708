#include "branched/network_extract.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "branched/plan_regularizer.hpp"

namespace branched {

std::size_t WeightedDigraph::degree(std::size_t v) const {
  std::set<std::size_t> neighbours;
  for (const Edge& e : edges) {
    if (e.tail == v) neighbours.insert(e.head);
    if (e.head == v) neighbours.insert(e.tail);
  }
  return neighbours.size();
}

std::vector<double> WeightedDigraph::net_outflow() const {
  std::vector<double> net(vertices.size(), 0.0);
  for (const Edge& e : edges) {
    net[e.tail] += e.weight;
    net[e.head] -= e.weight;
  }
  return net;
}

WeightedDigraph plan_to_graph(const SignedConfig& config, const FreeAtoms& atoms,
                              const TransportPlan& plan) {
  if (!is_regular(plan)) throw std::invalid_argument("plan_to_graph requires a regular plan");
  const Embedding pos(config, atoms);
  const NodeLayout& l = plan.layout();
  if (!(l == pos.layout())) throw std::invalid_argument("plan layout does not match the atoms");

  const double threshold = kZeroFlow * plan.total_mass();
  WeightedDigraph g;
  g.dimension = config.dimension;
  std::vector<std::size_t> vertex_of(l.size(), l.size());
  for (NodeId v = 0; v < l.size(); ++v) {
    const NodeRole role = l.role(v);
    if (role == NodeRole::Free && plan.throughput(v) <= threshold) continue;
    Vertex vx;
    vx.position.assign(pos[v].begin(), pos[v].end());
    vx.role = role == NodeRole::Source ? VertexRole::Source
              : role == NodeRole::Sink ? VertexRole::Sink
                                       : VertexRole::Free;
    vx.index = l.local(v);
    vertex_of[v] = g.vertices.size();
    g.vertices.push_back(std::move(vx));
  }
  for (const auto& [arc, w] : plan.entries()) {
    if (w <= threshold) continue;
    g.edges.push_back({vertex_of[arc.first], vertex_of[arc.second], w,
                       distance(pos[arc.first], pos[arc.second])});
  }
  return g;
}

namespace {

bool has_directed_cycle(const WeightedDigraph& g) {
  std::vector<std::size_t> indegree(g.vertices.size(), 0);
  std::vector<std::vector<std::size_t>> out(g.vertices.size());
  for (const Edge& e : g.edges) {
    out[e.tail].push_back(e.head);
    ++indegree[e.head];
  }
  std::vector<std::size_t> ready;
  for (std::size_t v = 0; v < indegree.size(); ++v)
    if (indegree[v] == 0) ready.push_back(v);
  std::size_t seen = 0;
  while (!ready.empty()) {
    const std::size_t u = ready.back();
    ready.pop_back();
    ++seen;
    for (std::size_t v : out[u])
      if (--indegree[v] == 0) ready.push_back(v);
  }
  return seen != g.vertices.size();
}

// First undirected cycle edge, or nullopt-equivalent -1.
long first_cycle_edge(const WeightedDigraph& g) {
  std::vector<std::size_t> root(g.vertices.size());
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](std::size_t v) {
    while (root[v] != v) v = root[v] = root[root[v]];
    return v;
  };
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const std::size_t a = find(g.edges[e].tail);
    const std::size_t b = find(g.edges[e].head);
    if (a == b) return static_cast<long>(e);
    root[a] = b;
  }
  return -1;
}

}  // namespace

ReducedTree reduce_graph(const WeightedDigraph& g) {
  if (has_directed_cycle(g)) throw std::invalid_argument("reduce_graph requires an acyclic graph");
  const std::size_t nv = g.vertices.size();
  std::vector<std::vector<std::size_t>> out_edges(nv), in_edges(nv);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    out_edges[g.edges[e].tail].push_back(e);
    in_edges[g.edges[e].head].push_back(e);
  }
  auto interior = [&](std::size_t v) {
    return g.vertices[v].role == VertexRole::Free && in_edges[v].size() == 1 &&
           out_edges[v].size() == 1;
  };

  ReducedTree t;
  t.graph.dimension = g.dimension;
  std::vector<std::size_t> kept(nv, nv);
  for (std::size_t v = 0; v < nv; ++v) {
    if (interior(v)) continue;
    kept[v] = t.graph.vertices.size();
    t.graph.vertices.push_back(g.vertices[v]);
  }
  for (std::size_t u = 0; u < nv; ++u) {
    if (interior(u)) continue;
    for (std::size_t first : out_edges[u]) {
      const double flow = g.edges[first].weight;
      std::vector<Point> chain{g.vertices[u].position};
      std::size_t v = g.edges[first].head;
      chain.push_back(g.vertices[v].position);
      while (interior(v)) {
        const Edge& next = g.edges[out_edges[v].front()];
        if (std::abs(next.weight - flow) > 1e-6 * std::max(flow, next.weight)) {
          std::ostringstream msg;
          msg << "chain flow is not constant at vertex " << v << ": " << flow << " vs "
              << next.weight;
          throw std::invalid_argument(msg.str());
        }
        v = next.head;
        chain.push_back(g.vertices[v].position);
      }
      t.graph.edges.push_back({kept[u], kept[v], flow, distance(chain.front(), chain.back())});
      t.chains.push_back(std::move(chain));
    }
  }
  return t;
}

double graph_cost(const WeightedDigraph& g, double q) {
  double s = 0.0;
  for (const Edge& e : g.edges) s += e.length * std::pow(e.weight, 1.0 / q);
  return s;
}

double graph_transport_cost(const WeightedDigraph& g, double q) {
  double s = 0.0;
  for (const Edge& e : g.edges) s += e.weight * std::pow(e.length, q);
  return s;
}

double straightness_defect(const ReducedTree& t, double q) {
  double s = 0.0;
  for (std::size_t e = 0; e < t.graph.edges.size(); ++e) {
    const auto& chain = t.chains[e];
    double walked = 0.0;
    for (std::size_t l = 0; l + 1 < chain.size(); ++l) walked += distance(chain[l], chain[l + 1]);
    s += std::pow(t.graph.edges[e].weight, 1.0 / q) * (walked - t.graph.edges[e].length);
  }
  return s;
}

bool StructureReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const StructureCheck& c) { return c.pass; });
}

const StructureCheck* StructureReport::find(const std::string& item) const {
  for (const StructureCheck& c : checks)
    if (c.item == item) return &c;
  return nullptr;
}

namespace {

// Perpendicular deviation of p from the line through a and b.
double off_line(const Point& p, const Point& a, const Point& b) {
  double ab2 = 0.0, t = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    ab2 += (b[d] - a[d]) * (b[d] - a[d]);
    t += (p[d] - a[d]) * (b[d] - a[d]);
  }
  t = ab2 > 0.0 ? t / ab2 : 0.0;
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double r = p[d] - (a[d] + t * (b[d] - a[d]));
    s += r * r;
  }
  return std::sqrt(s);
}

}  // namespace

double smallest_subset_imbalance(const SignedConfig& config) {
  std::vector<double> signed_mass;
  for (const Atom& a : config.sources)
    if (a.mass > 0.0) signed_mass.push_back(a.mass);
  for (const Atom& a : config.sinks)
    if (a.mass > 0.0) signed_mass.push_back(-a.mass);
  if (signed_mass.size() > 20) return 0.0;
  const double floor = 1e-12 * total_mass(config);
  double best = total_mass(config);
  const std::size_t subsets = std::size_t{1} << signed_mass.size();
  for (std::size_t s = 1; s + 1 < subsets; ++s) {
    double sum = 0.0;
    for (std::size_t k = 0; k < signed_mass.size(); ++k)
      if (s >> k & 1) sum += signed_mass[k];
    if (std::abs(sum) > floor) best = std::min(best, std::abs(sum));
  }
  return best;
}

StructureReport verify_structure(const ReducedTree& t, const SignedConfig& config) {
  StructureReport report;
  const WeightedDigraph& g = t.graph;
  const double mass = total_mass(config);
  const auto N = static_cast<double>(config.atoms_per_side());

  {
    StructureCheck c{"flux", true, {}};
    const auto net = g.net_outflow();
    for (std::size_t v = 0; v < g.vertices.size() && c.pass; ++v) {
      const Vertex& vx = g.vertices[v];
      const double expected = vx.role == VertexRole::Source ? config.sources[vx.index].mass
                              : vx.role == VertexRole::Sink ? -config.sinks[vx.index].mass
                                                            : 0.0;
      if (std::abs(net[v] - expected) > 1e-9 * mass) {
        c.pass = false;
        c.witness = "vertex " + std::to_string(v) + " net outflow " + std::to_string(net[v]);
      }
    }
    report.checks.push_back(c);
  }
  {
    StructureCheck c{"acyclic", true, {}};
    const long e = first_cycle_edge(g);
    if (e >= 0) {
      c.pass = false;
      c.witness = "edge " + std::to_string(e) + " closes a cycle";
    }
    report.checks.push_back(c);
  }
  {
    StructureCheck c{"interior degree", true, {}};
    for (std::size_t v = 0; v < g.vertices.size() && c.pass; ++v) {
      if (g.vertices[v].role != VertexRole::Free) continue;
      const std::size_t deg = g.degree(v);
      if (deg < 3) {
        c.pass = false;
        c.witness = "vertex " + std::to_string(v) + " has degree " + std::to_string(deg);
      }
    }
    report.checks.push_back(c);
  }
  {
    StructureCheck c{"vertex count", true, {}};
    const double limit = 2.0 * N * N * N + 2.0 * N;
    if (static_cast<double>(g.vertices.size()) > limit) {
      c.pass = false;
      c.witness = std::to_string(g.vertices.size()) + " vertices";
    }
    report.checks.push_back(c);
  }
  {
    StructureCheck c{"straight chains", true, {}};
    for (std::size_t e = 0; e < t.chains.size() && c.pass; ++e) {
      const auto& chain = t.chains[e];
      const double straight = distance(chain.front(), chain.back());
      double worst_offset = 0.0;
      std::vector<double> gaps;
      for (std::size_t l = 0; l + 1 < chain.size(); ++l) {
        gaps.push_back(distance(chain[l], chain[l + 1]));
        worst_offset = std::max(worst_offset, off_line(chain[l + 1], chain.front(), chain.back()));
      }
      const double mean = std::accumulate(gaps.begin(), gaps.end(), 0.0) / gaps.size();
      double worst_gap = 0.0;
      for (double gap : gaps) worst_gap = std::max(worst_gap, std::abs(gap - mean));
      if (worst_offset > kCollinearTolerance * straight ||
          worst_gap > kCollinearTolerance * mean) {
        c.pass = false;
        std::ostringstream w;
        w << "edge " << e << ": offset " << worst_offset << ", gap spread " << worst_gap
          << " over " << gaps.size() << " gaps";
        c.witness = w.str();
      }
    }
    report.checks.push_back(c);
  }
  {
    StructureCheck c{"edge weights", true, {}};
    const double lo = smallest_subset_imbalance(config);
    for (std::size_t e = 0; e < g.edges.size() && c.pass; ++e) {
      const double w = g.edges[e].weight;
      if (!(w > 0.0) || w < lo - 1e-9 * mass || w > mass * (1.0 + 1e-12)) {
        c.pass = false;
        std::ostringstream s;
        s << "edge " << e << " weight " << w << " outside [" << lo << ", " << mass << "]";
        c.witness = s.str();
      }
    }
    report.checks.push_back(c);
  }
  {
    StructureCheck c{"bounded", true, {}};
    const BoundingBox box = terminal_box(config);
    for (std::size_t v = 0; v < g.vertices.size() && c.pass; ++v) {
      if (!box.contains(g.vertices[v].position, 0.1)) {
        c.pass = false;
        c.witness = "vertex " + std::to_string(v) + " outside the inflated terminal box";
      }
    }
    report.checks.push_back(c);
  }
  return report;
}

}  // namespace branched
