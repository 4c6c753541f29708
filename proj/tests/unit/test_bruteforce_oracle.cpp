#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "branched/bruteforce_oracle.hpp"
#include "branched/transport_flow.hpp"
#include "support/oracles.hpp"

using namespace branched;

namespace {

SignedConfig y_instance() {
  SignedConfig c;
  c.dimension = 2;
  c.sources = {{{-1, 2}, 1}, {{1, 2}, 1}};
  c.sinks = {{{0, 0}, 2}};
  return c;
}

SignedConfig four_terminals() {
  SignedConfig c;
  c.dimension = 2;
  c.sources = {{{0, 0}, 1}, {{0, 1}, 1}};
  c.sinks = {{{3, 0}, 1}, {{3, 1}, 1}};
  return c;
}

}  // namespace

TEST_CASE("two terminals have one topology") {
  SignedConfig c;
  c.dimension = 2;
  c.sources = {{{0, 0}, 1}};
  c.sinks = {{{1, 0}, 1}};
  CHECK(enumerate_topologies(c, 0).size() == 1);
  CHECK(enumerate_topologies(c, 3).size() == 1);
}

TEST_CASE("three terminals: three spanning trees and one star") {
  const auto t = enumerate_topologies(y_instance(), 1);
  REQUIRE(t.size() == 4);
  CHECK(std::count_if(t.begin(), t.end(), [](const Topology& x) { return x.steiner == 0; }) == 3);
  CHECK(std::count_if(t.begin(), t.end(), [](const Topology& x) { return x.steiner == 1; }) == 1);
}

TEST_CASE("four terminals: counts and full topologies") {
  const auto t = enumerate_topologies(four_terminals(), 2);
  // 16 spanning trees, 13 trees with one Steiner point of degree >= 3 and
  // 3 with two Steiner points of degree 3.
  CHECK(t.size() == 32);
  using Side = std::set<std::size_t>;
  std::set<std::set<Side>> pairings;
  for (const Topology& x : t) {
    if (x.steiner != 2) continue;
    Side first, second;
    for (auto [a, b] : x.edges) {
      if (a < 4 && b == 4) first.insert(a);
      if (a < 4 && b == 5) second.insert(a);
    }
    pairings.insert({first, second});
  }
  CHECK(pairings == std::set<std::set<Side>>{{{0, 1}, {2, 3}}, {{0, 2}, {1, 3}}, {{0, 3}, {1, 2}}});
}

TEST_CASE("topology flows balance the terminal masses") {
  for (const Topology& t : enumerate_topologies(four_terminals(), 2)) {
    std::vector<double> net(t.terminals + t.steiner, 0.0);
    for (std::size_t e = 0; e < t.edges.size(); ++e) {
      net[t.edges[e].first] += t.flows[e];
      net[t.edges[e].second] -= t.flows[e];
    }
    CHECK(net[0] == doctest::Approx(1.0));
    CHECK(net[1] == doctest::Approx(1.0));
    CHECK(net[2] == doctest::Approx(-1.0));
    CHECK(net[3] == doctest::Approx(-1.0));
    for (std::size_t v = 4; v < net.size(); ++v) CHECK(net[v] == doctest::Approx(0.0));
  }
}

TEST_CASE("budget cap") {
  CHECK_THROWS_AS(enumerate_topologies(four_terminals(), 2, 5), OracleBudgetError);
}

TEST_CASE("single edge cost") {
  SignedConfig c;
  c.dimension = 2;
  c.sources = {{{0, 0}, 4}};
  c.sinks = {{{3, 4}, 4}};
  const OracleSolution o = oracle(c, 2.0);
  CHECK(o.cost == doctest::Approx(2.0 * 5.0));
  CHECK(o.graph().edges.size() == 1);
}

TEST_CASE("Y-instance: junction at (0,1), cost 3 sqrt 2") {
  const SignedConfig c = y_instance();
  const TerminalSet terminals = required_terminals(c);
  const auto topologies = enumerate_topologies(c, 1);
  for (const Topology& t : topologies) {
    const TopologySolution s = solve_topology(t, terminals, 2.0);
    CHECK(s.converged);
    if (t.steiner == 1) {
      CHECK(s.steiner[0][0] == doctest::Approx(0.0).epsilon(1e-7));
      CHECK(s.steiner[0][1] == doctest::Approx(1.0).epsilon(1e-7));
      CHECK(s.cost == doctest::Approx(3.0 * std::sqrt(2.0)).epsilon(1e-10));
    }
    // both sources straight into the sink
    if (t.steiner == 0 && std::count(t.flows.begin(), t.flows.end(), 0.0) == 0 &&
        std::all_of(t.edges.begin(), t.edges.end(), [](auto e) { return e.second == 2; }))
      CHECK(s.cost == doctest::Approx(2.0 * std::sqrt(5.0)));
  }
  const OracleSolution o = oracle(c, 2.0);
  CHECK(o.cost == doctest::Approx(3.0 * std::sqrt(2.0)).epsilon(1e-10));
  REQUIRE(o.steiner.size() == 1);
  CHECK(std::abs(o.steiner[0][0]) < 1e-7);
  CHECK(std::abs(o.steiner[0][1] - 1.0) < 1e-7);
  const WeightedDigraph g = o.graph();
  CHECK(g.vertices.size() == 4);
  CHECK(g.edges.size() == 3);
  CHECK(std::is_sorted(o.table.begin(), o.table.end(),
                       [](const RankedTopology& a, const RankedTopology& b) { return a.cost < b.cost; }));
}

TEST_CASE("a Steiner point collapsing onto a terminal is contracted") {
  SignedConfig c;
  c.dimension = 2;
  c.sources = {{{0, 0}, 2}};
  c.sinks = {{{1, 0}, 1}, {{2, 0}, 1}};
  const OracleSolution o = oracle(c, 2.0);
  CHECK(o.cost == doctest::Approx(std::sqrt(2.0) + 1.0).epsilon(1e-8));
  const WeightedDigraph g = o.graph();
  CHECK(g.edges.size() == 2);
  for (const Vertex& v : g.vertices) CHECK(v.role != VertexRole::Free);
}

TEST_CASE("zero-mass atoms are not terminals") {
  SignedConfig c = y_instance();
  c.sinks.push_back({{5, 5}, 0.0});
  CHECK(required_terminals(c).size() == 3);
  CHECK(oracle(c, 2.0).cost == doctest::Approx(3.0 * std::sqrt(2.0)).epsilon(1e-10));
}

TEST_CASE("q close to one approaches the one-Wasserstein distance") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 3; ++trial) {
    const SignedConfig c = testing_support::random_config(2, 2, 2, rng);
    const double w1 = wasserstein_q(c.sources, c.sinks, 1.0);
    const double value = oracle(c, 1.01).cost;
    CHECK(std::abs(value - w1) <= 0.02 * w1);
  }
}
