#pragma once

#include "branched/network_extract.hpp"

namespace branched {

/// Distance from p to the closed segment [a, b].
double point_segment_distance(std::span<const double> p, std::span<const double> a,
                              std::span<const double> b);

/// Hausdorff distance between the point sets covered by the edges (and
/// vertices) of two graphs. Each edge is sampled at spacing at most
/// `resolution`; the distance from each sample to the other set is exact.
/// Throws std::invalid_argument if either graph has no vertices or the
/// resolution is not positive.
double hausdorff(const WeightedDigraph& a, const WeightedDigraph& b, double resolution);

}  // namespace branched
