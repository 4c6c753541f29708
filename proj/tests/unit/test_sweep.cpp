#include <doctest.h>

#include <cmath>
#include <sstream>

#include "branched/sweep.hpp"

using namespace branched;

namespace {

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

}  // namespace

TEST_CASE("single-edge sweep follows the chain law") {
  SweepOptions options;
  options.ns = {1, 2, 4, 8, 16};
  const SweepResult r = run_sweep(unit_edge(), options);
  const double expected[] = {0.7071, 0.8165, 0.8944, 0.9428, 0.9701};
  double previous = 0.0;
  for (std::size_t k = 0; k < r.records.size(); ++k) {
    const SweepRecord& rec = r.records[k];
    CHECK(rec.error.empty());
    const double n = static_cast<double>(rec.n);
    CHECK(rec.rescaled == doctest::Approx(std::sqrt(n / (n + 1))).epsilon(1e-9));
    CHECK(rec.rescaled == doctest::Approx(expected[k]).epsilon(1e-4));
    CHECK(rec.rescaled > previous);
    CHECK(rec.rescaled < 1.0);
    CHECK(rec.lower <= rec.rescaled);
    CHECK(rec.rescaled <= rec.upper * (1 + 1e-9));
    CHECK(rec.hausdorff < 1e-6);
    previous = rec.rescaled;
  }
}

TEST_CASE("Y-instance sweep") {
  SweepOptions options;
  options.ns = {6, 12, 24, 48};
  const SweepResult r = run_sweep(y_instance(), options);
  const double limit = 3.0 * std::sqrt(2.0);
  CHECK(r.oracle.cost == doctest::Approx(limit));
  for (const SweepRecord& rec : r.records) {
    CHECK(rec.error.empty());
    CHECK(rec.lower <= rec.rescaled);
    CHECK(rec.rescaled <= rec.upper * (1 + 1e-9));
  }
  const SweepRecord& last = r.records.back();
  CHECK(std::abs(last.rescaled - limit) < 0.05 * limit);
  CHECK(std::abs(last.rescaled - limit) < last.upper - last.lower);
  CHECK(last.hausdorff < r.records.front().hausdorff);
}

TEST_CASE("sweep records are deterministic") {
  SweepOptions options;
  options.ns = {5, 9};
  options.params.seed = 3;
  const SweepResult a = run_sweep(y_instance(), options);
  const SweepResult b = run_sweep(y_instance(), options);
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    CHECK(a.records[k].wbar == b.records[k].wbar);
    CHECK(a.records[k].hausdorff == b.records[k].hausdorff);
  }
}

TEST_CASE("an invalid exponent stops the sweep before any record") {
  SweepOptions options;
  options.ns = {2, 3};
  options.params.q = 0.5;
  CHECK_THROWS_AS(run_sweep(unit_edge(), options), ValidationError);
}

TEST_CASE("zero atoms carry no upper bound or distance") {
  SweepOptions options;
  options.ns = {0, 2};
  const SweepResult r = run_sweep(unit_edge(), options);
  REQUIRE(r.records.size() == 2);
  CHECK(r.records[0].error.empty());
  CHECK(r.records[0].wbar == doctest::Approx(1.0));
  CHECK(std::isnan(r.records[0].upper));
  CHECK(std::isnan(r.records[0].hausdorff));
  CHECK_FALSE(std::isnan(r.records[1].upper));
}

TEST_CASE("bounds helpers") {
  CHECK(rescaled_lower_bound(1.0, 1, 2, 2.0) == doctest::Approx(std::sqrt(0.5)));
  SignedConfig c = unit_edge();
  WeightedDigraph g;
  g.dimension = 2;
  g.vertices = {{{0, 0}, VertexRole::Source, 0}, {{1, 0}, VertexRole::Sink, 0}};
  g.edges = {{0, 1, 1.0, 1.0}};
  CHECK(rescaled_upper_bound(c, g, 3, 2.0) == doctest::Approx(std::sqrt(3.0) * 0.5));
  CHECK(std::isnan(rescaled_upper_bound(c, g, 0, 2.0)));
}

TEST_CASE("csv layout") {
  SweepRecord ok;
  ok.n = 4;
  ok.wbar = 0.5;
  ok.rescaled = 1.0;
  ok.upper = 1.1;
  ok.lower = 0.9;
  ok.hausdorff = 0.01;
  ok.seconds = 0.2;
  SweepRecord bad;
  bad.n = 5;
  bad.error = "boom";
  std::ostringstream out;
  write_sweep_csv(out, {ok, bad});
  std::istringstream lines(out.str());
  std::string header, first, second;
  std::getline(lines, header);
  std::getline(lines, first);
  std::getline(lines, second);
  CHECK(header == "n,wbar,rescaled,upper,lower,hausdorff,seconds");
  CHECK(first.rfind("4,0.5,1,1.1", 0) == 0);
  CHECK(second.rfind("5,,,,,,", 0) == 0);
}
