#include "branched/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace branched {

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double t = a[d] - b[d];
    s += t * t;
  }
  return std::sqrt(s);
}

std::size_t SignedConfig::atoms_per_side() const {
  return std::max(sources.size(), sinks.size());
}

namespace {

void check_atoms(const std::vector<Atom>& atoms, std::size_t dimension,
                 const char* side) {
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const Atom& a = atoms[i];
    if (a.position.size() != dimension) {
      std::ostringstream msg;
      msg << "dimension mismatch: " << side << " " << i << " has "
          << a.position.size() << " coordinates, expected " << dimension;
      throw ValidationError(msg.str());
    }
    for (double c : a.position) {
      if (!std::isfinite(c)) {
        std::ostringstream msg;
        msg << side << " " << i << " has a non-finite coordinate";
        throw ValidationError(msg.str());
      }
    }
    if (!std::isfinite(a.mass) || a.mass < 0.0) {
      std::ostringstream msg;
      msg << side << " " << i << " has invalid mass " << a.mass;
      throw ValidationError(msg.str());
    }
  }
}

double mass_sum(const std::vector<Atom>& atoms) {
  return std::accumulate(atoms.begin(), atoms.end(), 0.0,
                         [](double s, const Atom& a) { return s + a.mass; });
}

}  // namespace

SignedConfig validate(SignedConfig config) {
  if (config.dimension == 0) throw ValidationError("dimension must be positive");
  if (config.sources.empty()) throw ValidationError("empty source list");
  if (config.sinks.empty()) throw ValidationError("empty sink list");
  check_atoms(config.sources, config.dimension, "source");
  check_atoms(config.sinks, config.dimension, "sink");

  const double plus = mass_sum(config.sources);
  const double minus = mass_sum(config.sinks);
  if (std::abs(plus - minus) > kBalanceTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "unbalanced masses: sources " << plus << ", sinks " << minus;
    throw ValidationError(msg.str());
  }
  if (!(plus > 0.0)) throw ValidationError("total mass must be positive");
  return config;
}

std::vector<AtomRef> zero_mass_atoms(const SignedConfig& config) {
  std::vector<AtomRef> out;
  for (std::size_t i = 0; i < config.sources.size(); ++i)
    if (config.sources[i].mass == 0.0) out.push_back({Side::Source, i});
  for (std::size_t j = 0; j < config.sinks.size(); ++j)
    if (config.sinks[j].mass == 0.0) out.push_back({Side::Sink, j});
  return out;
}

double total_mass(const SignedConfig& config) { return mass_sum(config.sources); }

void require_branching_exponent(double q) {
  if (!(q > 1.0) || !std::isfinite(q)) {
    std::ostringstream msg;
    msg << "exponent q must satisfy q > 1, got " << q;
    throw ValidationError(msg.str());
  }
}

double BoundingBox::diameter() const {
  double s = 0.0;
  for (std::size_t d = 0; d < lo.size(); ++d) s += (hi[d] - lo[d]) * (hi[d] - lo[d]);
  return std::sqrt(s);
}

bool BoundingBox::contains(std::span<const double> p, double inflate_fraction) const {
  const double pad = inflate_fraction * diameter();
  for (std::size_t d = 0; d < lo.size(); ++d) {
    if (p[d] < lo[d] - pad || p[d] > hi[d] + pad) return false;
  }
  return true;
}

BoundingBox terminal_box(const SignedConfig& config) {
  BoundingBox box;
  box.lo.assign(config.dimension, std::numeric_limits<double>::infinity());
  box.hi.assign(config.dimension, -std::numeric_limits<double>::infinity());
  auto grow = [&](const Atom& a) {
    for (std::size_t d = 0; d < config.dimension; ++d) {
      box.lo[d] = std::min(box.lo[d], a.position[d]);
      box.hi[d] = std::max(box.hi[d], a.position[d]);
    }
  };
  std::for_each(config.sources.begin(), config.sources.end(), grow);
  std::for_each(config.sinks.begin(), config.sinks.end(), grow);
  return box;
}

double terminal_diameter(const SignedConfig& config) {
  std::vector<const Point*> pts;
  for (const Atom& a : config.sources) pts.push_back(&a.position);
  for (const Atom& a : config.sinks) pts.push_back(&a.position);
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      best = std::max(best, distance(*pts[i], *pts[j]));
  return best;
}

}  // namespace branched
