#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "branched/plan_regularizer.hpp"
#include "support/oracles.hpp"

using namespace branched;

namespace {

// x=(0,0) -> y=(1,0) with two free atoms.
SignedConfig unit_edge() {
  SignedConfig c;
  c.dimension = 2;
  c.sources = {{{0, 0}, 1}};
  c.sinks = {{{1, 0}, 1}};
  return c;
}

}  // namespace

TEST_CASE("two-cycle between free atoms cancels") {
  const NodeLayout l(1, 1, 2);
  TransportPlan p(l);
  p.set(0, 1, 1.0);
  p.set(2, 3, 0.4);
  p.set(3, 2, 0.4);
  const TransportPlan out = cancel_cycles(p);
  CHECK(out(2, 3) == 0.0);
  CHECK(out(3, 2) == 0.0);
  CHECK(out(0, 1) == 1.0);
}

TEST_CASE("self-loops are cancelled") {
  TransportPlan p(NodeLayout(1, 1, 1));
  p.set(0, 1, 1.0);
  p.set(2, 2, 0.3);
  const RegularityCheck before = is_regular(p);
  CHECK_FALSE(before.regular);
  CHECK(before.kind == Irregularity::SelfLoop);
  CHECK(before.first == std::vector<NodeId>{2, 2});
  CHECK(is_regular(cancel_cycles(p)).regular);
}

TEST_CASE("acyclic plan is a fixed point of cycle cancellation") {
  TransportPlan p(NodeLayout(1, 1, 2));
  p.set(0, 2, 0.5);
  p.set(2, 1, 0.5);
  p.set(0, 3, 0.5);
  p.set(3, 1, 0.5);
  CHECK(cancel_cycles(p) == p);
}

TEST_CASE("injected three-cycle is removed and the cost drops") {
  std::mt19937_64 rng(21);
  const SignedConfig c = testing_support::random_config(2, 2, 2, rng);
  const FreeAtoms z = testing_support::random_atoms(2, 3, rng);
  const Embedding pos(c, z);
  TransportPlan p = min_cost_plan(c, z, 2.0).plan;
  p.add(4, 5, 0.2);
  p.add(5, 6, 0.2);
  p.add(6, 4, 0.2);
  const TransportPlan out = cancel_cycles(p);
  CHECK(is_regular(out).kind != Irregularity::Cycle);
  CHECK(plan_cost(out, pos, 2.0) < plan_cost(p, pos, 2.0));
  CHECK(check_feasibility(out, c).feasible);
}

TEST_CASE("parallel paths merge onto the cheaper one") {
  const SignedConfig c = unit_edge();
  const FreeAtoms z(2, {0.5, 0.1, 0.5, 0.6});  // z1 near the segment, z2 far off
  const Embedding pos(c, z);
  TransportPlan p(NodeLayout(1, 1, 2));
  p.set(0, 2, 0.5);
  p.set(2, 1, 0.5);
  p.set(0, 3, 0.5);
  p.set(3, 1, 0.5);
  CHECK(is_regular(p).kind == Irregularity::ParallelPaths);
  const TransportPlan out = merge_parallel_paths(p, pos, 2.0);
  CHECK(out(0, 2) == doctest::Approx(1.0));
  CHECK(out(2, 1) == doctest::Approx(1.0));
  CHECK(out(0, 3) == 0.0);
  CHECK(out(3, 1) == 0.0);
  CHECK(is_regular(out).regular);
}

TEST_CASE("duplicated path witness lists both paths") {
  TransportPlan p(NodeLayout(1, 1, 2));
  p.set(0, 2, 0.5);
  p.set(2, 1, 0.5);
  p.set(0, 3, 0.5);
  p.set(3, 1, 0.5);
  const RegularityCheck r = is_regular(p);
  REQUIRE(r.kind == Irregularity::ParallelPaths);
  CHECK(r.first.front() == r.second.front());
  CHECK(r.first.back() == r.second.back());
  CHECK(r.first != r.second);
  const std::set<std::vector<NodeId>> paths{r.first, r.second};
  CHECK(paths == std::set<std::vector<NodeId>>{{0, 2, 1}, {0, 3, 1}});
}

TEST_CASE("single path plan is unchanged by merging") {
  const SignedConfig c = unit_edge();
  const FreeAtoms z(2, {0.3, 0.0, 0.7, 0.0});
  TransportPlan p(NodeLayout(1, 1, 2));
  p.set(0, 2, 1.0);
  p.set(2, 3, 1.0);
  p.set(3, 1, 1.0);
  CHECK(merge_parallel_paths(p, Embedding(c, z), 2.0) == p);
}

TEST_CASE("merging requires an acyclic plan") {
  const SignedConfig c = unit_edge();
  const FreeAtoms z(2, {0.3, 0.0, 0.7, 0.0});
  TransportPlan p(NodeLayout(1, 1, 2));
  p.set(0, 1, 1.0);
  p.set(2, 3, 1.0);
  p.set(3, 2, 1.0);
  CHECK_THROWS(merge_parallel_paths(p, Embedding(c, z), 2.0));
}

TEST_CASE("random plans regularize without raising the cost") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t S = 1 + rng() % 3, T = 1 + rng() % 3, n = rng() % 7;
    const SignedConfig c = testing_support::random_config(S, T, 2, rng);
    const FreeAtoms z = testing_support::random_atoms(2, n, rng);
    const Embedding pos(c, z);
    const double q = trial % 2 ? 2.0 : 1.5;
    const TransportPlan p = testing_support::random_feasible_plan(c, n, rng);
    REQUIRE(check_feasibility(p, c).feasible);
    const TransportPlan out = regularize(p, pos, q);
    CHECK(is_regular(out).regular);
    CHECK(testing_support::regular_by_path_enumeration(out, kZeroFlow * out.total_mass()));
    CHECK(check_feasibility(out, c).feasible);
    CHECK(plan_cost(out, pos, q) <= plan_cost(p, pos, q) * (1 + 1e-12) + 1e-15);
  }
}

TEST_CASE("maximal chains of a pure path") {
  TransportPlan p(NodeLayout(1, 1, 2));
  p.set(0, 2, 1.0);
  p.set(2, 3, 1.0);
  p.set(3, 1, 1.0);
  const auto chains = maximal_chains(p);
  REQUIRE(chains.size() == 1);
  CHECK(chains[0].nodes == std::vector<NodeId>{0, 2, 3, 1});
  CHECK(chains[0].flow == 1.0);
}

TEST_CASE("Y support splits into three chains at the branch vertex") {
  // sources 0,1; sink 2; free atoms 3 (branch), 4, 5, 6
  TransportPlan p(NodeLayout(2, 1, 4));
  p.set(0, 4, 1.0);
  p.set(4, 3, 1.0);
  p.set(1, 5, 1.0);
  p.set(5, 3, 1.0);
  p.set(3, 6, 2.0);
  p.set(6, 2, 2.0);
  const auto chains = maximal_chains(p);
  REQUIRE(chains.size() == 3);
  for (const Chain& ch : chains) {
    const bool touches = ch.nodes.front() == 3 || ch.nodes.back() == 3;
    CHECK(touches);
  }
}

TEST_CASE("chains of random regular plans cover every arc once") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const SignedConfig c = testing_support::random_config(2, 2, 2, rng);
    const std::size_t n = rng() % 6;
    const FreeAtoms z = testing_support::random_atoms(2, n, rng);
    const TransportPlan p =
        regularize(testing_support::random_feasible_plan(c, n, rng), Embedding(c, z), 2.0);
    std::map<std::pair<NodeId, NodeId>, int> covered;
    for (const Chain& ch : maximal_chains(p))
      for (std::size_t k = 0; k + 1 < ch.nodes.size(); ++k) ++covered[{ch.nodes[k], ch.nodes[k + 1]}];
    std::size_t positive = 0;
    for (const auto& [arc, w] : p.entries()) {
      if (w <= kZeroFlow * p.total_mass()) continue;
      ++positive;
      CHECK(covered[arc] == 1);
    }
    CHECK(covered.size() == positive);
  }
}

TEST_CASE("maximal chains reject irregular plans") {
  TransportPlan p(NodeLayout(1, 1, 1));
  p.set(0, 1, 1.0);
  p.set(2, 2, 1.0);
  CHECK_THROWS_AS(maximal_chains(p), std::invalid_argument);
}
