#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace branched {

using Point = std::vector<double>;

/// Euclidean distance between two points of equal dimension.
double distance(std::span<const double> a, std::span<const double> b);

/// A weighted Dirac mass.
struct Atom {
  Point position;
  double mass = 0.0;

  bool operator==(const Atom&) const = default;
};

/// The signed atomic measure sources - sinks.
///
/// Source and sink lists may have different lengths; a shorter side is
/// equivalent to padding it with zero-mass atoms.
struct SignedConfig {
  std::size_t dimension = 0;
  std::vector<Atom> sources;
  std::vector<Atom> sinks;

  bool operator==(const SignedConfig&) const = default;

  /// Number of atoms per side, max(#sources, #sinks).
  std::size_t atoms_per_side() const;
};

/// Solver knobs shared by the optimization layers.
struct CostParams {
  double q = 2.0;

  std::size_t restarts = 8;
  std::uint64_t seed = 0;

  // alternating minimization
  std::size_t max_rounds = 200;
  double round_tolerance = 1e-8;

  // position solver
  std::size_t position_iterations = 500;
  double position_tolerance = 1e-10;
  double armijo = 1e-4;
};

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kBalanceTolerance = 1e-12;

enum class Side { Source, Sink };

struct AtomRef {
  Side side;
  std::size_t index;

  bool operator==(const AtomRef&) const = default;
};

/// Checks balance, dimensions and finiteness. Throws ValidationError.
SignedConfig validate(SignedConfig config);

/// Zero-mass atoms are legal but flagged; they are not required terminals.
std::vector<AtomRef> zero_mass_atoms(const SignedConfig& config);

/// Sum of source masses.
double total_mass(const SignedConfig& config);

/// Throws ValidationError unless q > 1.
void require_branching_exponent(double q);

/// Axis-aligned bounding box of all terminals.
struct BoundingBox {
  Point lo;
  Point hi;

  double diameter() const;
  bool contains(std::span<const double> p, double inflate_fraction) const;
};

BoundingBox terminal_box(const SignedConfig& config);

/// Largest distance between any two terminals.
double terminal_diameter(const SignedConfig& config);

}  // namespace branched
