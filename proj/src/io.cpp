#include "branched/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace branched {

namespace {

std::vector<Atom> atoms_from_json(const Json& list, const char* what) {
  if (!list.is_array()) throw ValidationError(std::string(what) + " must be an array");
  std::vector<Atom> out;
  for (const Json& a : list) {
    if (!a.is_object() || !a.contains("position") || !a.contains("mass"))
      throw ValidationError(std::string(what) + " entries need position and mass");
    Atom atom;
    atom.position = a.at("position").get<Point>();
    atom.mass = a.at("mass").get<double>();
    out.push_back(std::move(atom));
  }
  return out;
}

Json atoms_to_json(const std::vector<Atom>& atoms) {
  Json list = Json::array();
  for (const Atom& a : atoms) list.push_back({{"position", a.position}, {"mass", a.mass}});
  return list;
}

// JSON has no infinities or NaN; write them as null.
Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

const char* role_name(VertexRole r) {
  switch (r) {
    case VertexRole::Source: return "source";
    case VertexRole::Sink: return "sink";
    case VertexRole::Free: return "free";
  }
  return "free";
}

}  // namespace

Problem problem_from_json(const Json& j) {
  try {
    if (!j.is_object()) throw ValidationError("problem must be a JSON object");
    Problem p;
    p.config.dimension = j.at("dimension").get<std::size_t>();
    p.q = j.value("q", 2.0);
    p.config.sources = atoms_from_json(j.at("sources"), "sources");
    p.config.sinks = atoms_from_json(j.at("sinks"), "sinks");
    p.config = validate(std::move(p.config));
    if (!(p.q >= 1.0) || !std::isfinite(p.q)) throw ValidationError("q must be a finite number >= 1");
    return p;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed problem: ") + e.what());
  }
}

Json to_json(const Problem& p) {
  return {{"dimension", p.config.dimension},
          {"q", p.q},
          {"sources", atoms_to_json(p.config.sources)},
          {"sinks", atoms_to_json(p.config.sinks)}};
}

Problem load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw ValidationError("cannot parse " + path.string() + ": " + e.what());
  }
  return problem_from_json(j);
}

Json to_json(const TransportPlan& plan) {
  Json entries = Json::array();
  for (const PlanTriplet& t : to_triplets(plan))
    entries.push_back({{"row", t.row}, {"col", t.col}, {"value", t.value}});
  const NodeLayout& l = plan.layout();
  return {{"sources", l.sources()}, {"sinks", l.sinks()}, {"free", l.free()}, {"entries", entries}};
}

TransportPlan plan_from_json(const Json& j) {
  const NodeLayout layout(j.at("sources").get<std::size_t>(), j.at("sinks").get<std::size_t>(),
                          j.at("free").get<std::size_t>());
  std::vector<PlanTriplet> triplets;
  for (const Json& e : j.at("entries"))
    triplets.push_back({e.at("row").get<std::size_t>(), e.at("col").get<std::size_t>(),
                        e.at("value").get<double>()});
  return from_triplets(layout, triplets);
}

Json to_json(const WeightedDigraph& g) {
  Json vertices = Json::array(), edges = Json::array();
  for (const Vertex& v : g.vertices)
    vertices.push_back({{"position", v.position}, {"role", role_name(v.role)}, {"index", v.index}});
  for (const Edge& e : g.edges)
    edges.push_back(
        {{"tail", e.tail}, {"head", e.head}, {"weight", e.weight}, {"length", e.length}});
  return {{"dimension", g.dimension}, {"vertices", vertices}, {"edges", edges}};
}

WeightedDigraph graph_from_json(const Json& j) {
  WeightedDigraph g;
  g.dimension = j.at("dimension").get<std::size_t>();
  for (const Json& v : j.at("vertices")) {
    Vertex vx;
    vx.position = v.at("position").get<Point>();
    const std::string role = v.at("role").get<std::string>();
    vx.role = role == "source" ? VertexRole::Source
              : role == "sink" ? VertexRole::Sink
                               : VertexRole::Free;
    vx.index = v.at("index").get<std::size_t>();
    g.vertices.push_back(std::move(vx));
  }
  for (const Json& e : j.at("edges")) {
    const auto tail = e.at("tail").get<std::size_t>(), head = e.at("head").get<std::size_t>();
    if (tail >= g.vertices.size() || head >= g.vertices.size())
      throw std::invalid_argument("edge endpoint out of range");
    g.edges.push_back({tail, head, e.at("weight").get<double>(), e.at("length").get<double>()});
  }
  return g;
}

Json to_json(const FreeAtoms& atoms) { return atoms.points(); }

Json to_json(const SolveResult& r) {
  return {{"n", r.n},
          {"q", r.q},
          {"cost", r.cost_q},
          {"wbar", r.wbar},
          {"rescaled", r.rescaled},
          {"rounds", r.rounds},
          {"converged", r.converged},
          {"monotone", r.monotone},
          {"best_start", r.best_start},
          {"start_costs", r.start_costs},
          {"unused_atoms", r.unused_atoms},
          {"atoms", to_json(r.atoms)},
          {"plan", to_json(r.plan)}};
}

Json to_json(const OracleSolution& o, std::size_t table_rows) {
  Json edges = Json::array();
  for (std::size_t e = 0; e < o.topology.edges.size(); ++e)
    edges.push_back({o.topology.edges[e].first, o.topology.edges[e].second, o.topology.flows[e]});
  Json table = Json::array();
  for (std::size_t k = 0; k < o.table.size() && k < table_rows; ++k)
    table.push_back({{"topology", o.table[k].topology},
                     {"cost", o.table[k].cost},
                     {"converged", o.table[k].converged}});
  return {{"q", o.q},
          {"cost", o.cost},
          {"terminals", o.terminals.positions},
          {"net_mass", o.terminals.net_mass},
          {"steiner", o.steiner},
          {"edges", edges},
          {"topologies", o.table.size()},
          {"ranking", table},
          {"graph", to_json(o.graph())}};
}

Json to_json(const Allocation& a) {
  Json atoms = Json::array();
  for (const AllocatedAtom& x : a.atoms)
    atoms.push_back({{"position", x.position}, {"mass", x.mass}, {"edge", x.edge}});
  return {{"counts", a.counts},
          {"fractions", a.fractions},
          {"chain_bound", a.chain_bound},
          {"atoms", atoms}};
}

Json to_json(const SweepRecord& r) {
  Json j = {{"n", r.n},
            {"wbar", number(r.wbar)},
            {"rescaled", number(r.rescaled)},
            {"upper", number(r.upper)},
            {"lower", number(r.lower)},
            {"hausdorff", number(r.hausdorff)},
            {"seconds", r.seconds},
            {"converged", r.converged}};
  if (!r.error.empty()) j["error"] = r.error;
  if (r.solution) j["solution"] = to_json(*r.solution);
  return j;
}

void write_atomically(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    if (!out.flush()) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace branched
