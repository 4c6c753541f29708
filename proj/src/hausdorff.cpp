#include "branched/hausdorff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace branched {

double point_segment_distance(std::span<const double> p, std::span<const double> a,
                              std::span<const double> b) {
  double ab2 = 0.0, t = 0.0;
  for (std::size_t d = 0; d < p.size(); ++d) {
    ab2 += (b[d] - a[d]) * (b[d] - a[d]);
    t += (p[d] - a[d]) * (b[d] - a[d]);
  }
  t = ab2 > 0.0 ? std::clamp(t / ab2, 0.0, 1.0) : 0.0;
  double s = 0.0;
  for (std::size_t d = 0; d < p.size(); ++d) {
    const double r = p[d] - (a[d] + t * (b[d] - a[d]));
    s += r * r;
  }
  return std::sqrt(s);
}

namespace {

double distance_to_set(std::span<const double> p, const WeightedDigraph& g) {
  double best = std::numeric_limits<double>::infinity();
  for (const Vertex& v : g.vertices) best = std::min(best, distance(p, v.position));
  for (const Edge& e : g.edges)
    best = std::min(best, point_segment_distance(p, g.vertices[e.tail].position,
                                                 g.vertices[e.head].position));
  return best;
}

double directed(const WeightedDigraph& from, const WeightedDigraph& to, double resolution) {
  double worst = 0.0;
  for (const Vertex& v : from.vertices) worst = std::max(worst, distance_to_set(v.position, to));
  Point p(from.dimension);
  for (const Edge& e : from.edges) {
    const Point& a = from.vertices[e.tail].position;
    const Point& b = from.vertices[e.head].position;
    const auto steps = static_cast<std::size_t>(std::ceil(distance(a, b) / resolution));
    for (std::size_t k = 1; k < steps; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(steps);
      for (std::size_t d = 0; d < p.size(); ++d) p[d] = a[d] + t * (b[d] - a[d]);
      worst = std::max(worst, distance_to_set(p, to));
    }
  }
  return worst;
}

}  // namespace

double hausdorff(const WeightedDigraph& a, const WeightedDigraph& b, double resolution) {
  if (a.vertices.empty() || b.vertices.empty())
    throw std::invalid_argument("hausdorff needs two non-empty graphs");
  if (!(resolution > 0.0)) throw std::invalid_argument("resolution must be positive");
  if (a.dimension != b.dimension) throw std::invalid_argument("graph dimensions differ");
  return std::max(directed(a, b, resolution), directed(b, a, resolution));
}

}  // namespace branched
