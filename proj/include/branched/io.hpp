#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "branched/atom_allocator.hpp"
#include "branched/bruteforce_oracle.hpp"
#include "branched/position_optimizer.hpp"
#include "branched/sweep.hpp"

namespace branched {

using Json = nlohmann::json;

/// A problem file: {"dimension", "q", "sources": [{"position", "mass"}], "sinks": [...]}.
struct Problem {
  SignedConfig config;
  double q = 2.0;
};

/// Parses and validates. Throws ValidationError on malformed input.
Problem problem_from_json(const Json& j);
Json to_json(const Problem& p);
Problem load_problem(const std::filesystem::path& path);

/// {"sources", "sinks", "free", "entries": [{"row", "col", "value"}]} with
/// rows indexing sources then free atoms and columns sinks then free atoms.
Json to_json(const TransportPlan& plan);
TransportPlan plan_from_json(const Json& j);

Json to_json(const WeightedDigraph& g);
WeightedDigraph graph_from_json(const Json& j);

Json to_json(const FreeAtoms& atoms);
Json to_json(const SolveResult& r);
Json to_json(const OracleSolution& o, std::size_t table_rows = 20);
Json to_json(const Allocation& a);
Json to_json(const SweepRecord& r);

/// Writes to a temporary sibling and renames it into place.
void write_atomically(const std::filesystem::path& path, const std::string& contents);

}  // namespace branched
