#include "branched/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace branched {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void render_svg(std::ostream& out, const WeightedDigraph& g, const RenderOptions& options) {
  if (g.dimension != 2) throw std::invalid_argument("render_svg draws planar networks only");
  if (g.vertices.empty()) throw std::invalid_argument("nothing to draw");

  double lo[2] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  double hi[2] = {-lo[0], -lo[1]};
  for (const Vertex& v : g.vertices)
    for (int d = 0; d < 2; ++d) {
      lo[d] = std::min(lo[d], v.position[d]);
      hi[d] = std::max(hi[d], v.position[d]);
    }
  double span = std::max({hi[0] - lo[0], hi[1] - lo[1], 1e-12});
  const double pad = 0.1 * span;
  for (int d = 0; d < 2; ++d) {
    lo[d] -= pad;
    hi[d] += pad;
  }
  span += 2.0 * pad;
  const double scale = options.width / span;
  const double height = (hi[1] - lo[1]) * scale;
  const double width = (hi[0] - lo[0]) * scale;
  auto X = [&](const Point& p) { return (p[0] - lo[0]) * scale; };
  auto Y = [&](const Point& p) { return (hi[1] - p[1]) * scale; };

  double heaviest = 0.0;
  for (const Edge& e : g.edges) heaviest = std::max(heaviest, std::pow(e.weight, 1.0 / options.q));

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" "
         "markerWidth=\"4\" markerHeight=\"4\" orient=\"auto-start-reverse\">"
         "<path d=\"M0,0 L10,5 L0,10 z\" fill=\"#444\"/></marker></defs>\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!options.title.empty())
    out << "<text x=\"8\" y=\"18\" font-family=\"sans-serif\" font-size=\"14\">"
        << escape(options.title) << "</text>\n";

  for (const Edge& e : g.edges) {
    const Point& a = g.vertices[e.tail].position;
    const Point& b = g.vertices[e.head].position;
    const double w = heaviest > 0.0
                         ? std::max(0.5, options.max_stroke * std::pow(e.weight, 1.0 / options.q) / heaviest)
                         : 1.0;
    out << "<line x1=\"" << X(a) << "\" y1=\"" << Y(a) << "\" x2=\"" << X(b) << "\" y2=\"" << Y(b)
        << "\" stroke=\"#444\" stroke-width=\"" << w
        << "\" stroke-linecap=\"round\" marker-end=\"url(#arrow)\"><title>" << e.weight
        << "</title></line>\n";
  }
  for (const Vertex& v : g.vertices) {
    if (v.role == VertexRole::Free) {
      out << "<circle cx=\"" << X(v.position) << "\" cy=\"" << Y(v.position)
          << "\" r=\"2.5\" fill=\"#222\"/>\n";
      continue;
    }
    const bool source = v.role == VertexRole::Source;
    const std::string label = (source ? "s" : "t") + std::to_string(v.index);
    out << "<circle cx=\"" << X(v.position) << "\" cy=\"" << Y(v.position) << "\" r=\"7\" fill=\""
        << (source ? "#2b6cb0" : "#c53030") << "\"/>\n";
    out << "<text x=\"" << X(v.position) + 9 << "\" y=\"" << Y(v.position) - 9
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << label << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace branched
