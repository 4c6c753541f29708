#pragma once

#include <iosfwd>
#include <string>

#include "branched/network_extract.hpp"

namespace branched {

struct RenderOptions {
  double width = 640.0;
  double max_stroke = 8.0;  // px for the heaviest edge
  double q = 2.0;
  std::string title;
};

/// SVG drawing of a planar network: terminals as labelled disks (sources
/// blue, sinks red), free vertices as small dots, edges as arrows with
/// stroke width proportional to weight^(1/q). Throws std::invalid_argument
/// unless the graph is two-dimensional.
void render_svg(std::ostream& out, const WeightedDigraph& g, const RenderOptions& options);

}  // namespace branched
