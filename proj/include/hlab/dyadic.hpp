#pragma once
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"

#include "hlab/grid.hpp"

namespace hlab::dyadic {

// All cube families live inside the root cube [-2^L, 2^L]^n; L bounds the
// ancestor chains that the packing inequality has to be checked on.
inline constexpr int kDefaultRootExponent = 4;

// Closed dyadic cube  prod_i [ coords[i] * 2^-level, (coords[i]+1) * 2^-level ].
// Negative levels give side lengths above 1. All geometry derived from the
// integer data is binary-exact.
struct DyadicCube {
  int level = 0;
  std::vector<std::int64_t> coords{0};

  int dim() const { return static_cast<int>(coords.size()); }
  double side() const;
  double min_corner(int axis) const;
  double max_corner(int axis) const;
  double diameter() const;  // sqrt(dim) * side

  DyadicCube parent() const;
  DyadicCube ancestor_at(int ancestor_level) const;  // requires ancestor_level <= level
  bool contains(const DyadicCube& other) const;      // other subseteq this
  bool contains_point(std::span<const double> x) const;

  // The level-`level` cube whose half-open copy [k 2^-l, (k+1) 2^-l) holds x.
  static DyadicCube containing_point(int level, std::span<const double> x);

  void validate() const;

  friend bool operator==(const DyadicCube&, const DyadicCube&) = default;
  friend auto operator<=>(const DyadicCube&, const DyadicCube&) = default;
};

enum class CubeRelation { disjoint, equal, contains, contained };
// `contains`: b inside a; `contained`: a inside b. Two dyadic cubes are
// always nested or have disjoint interiors.
CubeRelation relate(const DyadicCube& a, const DyadicCube& b);

bool within_root(const DyadicCube& cube, int root_exponent);

// Finite multiset of dyadic cubes with a weight exponent tau:
// the tau-weight of the family is sum_i side(Q_i)^tau.
struct CubeFamily {
  std::vector<DyadicCube> cubes;
  double tau = 1.0;

  int dim() const { return cubes.empty() ? 0 : cubes.front().dim(); }
  double tau_weight() const;
  void validate(int root_exponent = kDefaultRootExponent) const;
};

struct PackingViolation {
  DyadicCube witness;
  double weight_inside = 0.0;
  double cap = 0.0;
};

// Verifies pairwise nonoverlap and the packing inequality
//   side(Q)^tau >= sum over members inside Q of side(Q_j)^tau
// over every dyadic ancestor of a member down to the root cube. That
// candidate set is exhaustive: the member sum of any other dyadic cube
// coincides with the sum of the minimal member ancestor inside it.
std::optional<PackingViolation> packing_violation(const CubeFamily& family,
                                                  int root_exponent = kDefaultRootExponent);

// A cube family validated to be pairwise nonoverlapping and to satisfy the
// packing inequality for its tau. Obtain via regularize() or validated().
class RegularFamily {
 public:
  static RegularFamily validated(CubeFamily family,
                                 int root_exponent = kDefaultRootExponent);

  const CubeFamily& family() const { return family_; }
  const std::vector<DyadicCube>& cubes() const { return family_.cubes; }
  double tau() const { return family_.tau; }
  int root_exponent() const { return root_exponent_; }

 private:
  RegularFamily(CubeFamily family, int root_exponent)
      : family_(std::move(family)), root_exponent_(root_exponent) {}
  friend RegularFamily regularize(const CubeFamily&, int);

  CubeFamily family_;
  int root_exponent_;
};

// Bottom-up regularization: duplicates are coalesced (multiplicity summed
// into the weight); then, walking candidate ancestors from the deepest
// member level up to the root, any dyadic cube whose interior member weight
// strictly exceeds side(Q)^tau replaces those members. Ties do not merge.
// Coverage only grows, the tau-weight never increases, and the result is
// idempotent under a second pass.
RegularFamily regularize(const CubeFamily& family,
                         int root_exponent = kDefaultRootExponent);

// Measure carried by a regular family: density side(Q_i)^(tau - n) * Lebesgue
// on each member, so mu(Q_i) = side(Q_i)^tau. Satisfies the Frostman bound
// mu(Q) <= side(Q)^tau on every dyadic cube.
class FrostmanMeasure {
 public:
  explicit FrostmanMeasure(RegularFamily family);

  const RegularFamily& family() const { return family_; }
  double tau() const { return family_.tau(); }
  int dim() const { return family_.family().dim(); }

  double mass(const DyadicCube& q) const;
  double total_mass() const;

  // integral of f (resp. |f|^exponent) against the measure; family cubes
  // must be aligned with and contained in f's grid box.
  double integrate(const grid::GridFunction& f) const;
  double integrate_abs_pow(const grid::GridFunction& f, double exponent) const;

 private:
  RegularFamily family_;
};

FrostmanMeasure frostman_measure(const RegularFamily& family);
FrostmanMeasure frostman_measure(const CubeFamily& family, double tau,
                                 int root_exponent = kDefaultRootExponent);

// Choquet-type norm |||mu|||_beta = sup over dyadic cubes I of
// side(I)^-beta * mu(I). Throws OverflowError when the supremum is infinite
// (beta above the ambient dimension with positive mass).
double measure_norm_beta(const FrostmanMeasure& mu, double beta);

// Half-open index ranges of the grid cells tiling a dyadic cube. Throws when
// the cube is not aligned with the grid or escapes the box.
struct CellRange {
  std::array<int, 2> lo{0, 0};
  std::array<int, 2> hi{1, 1};
};
CellRange cells_in_cube(const grid::GridFunction& f, const DyadicCube& q);

// Finite point masses; the beta-norm is infinite for any beta > 0.
struct DiscreteMeasure {
  int dim = 1;
  std::vector<std::array<double, 2>> points;
  std::vector<double> weights;
};
double measure_norm_beta(const DiscreteMeasure& mu, double beta);

// JSON schema: {"tau": 0.5, "cubes": [{"level": 3, "coords": [1, 5]}, ...]}.
// Integer payload, so round-trips are bit-exact.
void to_json(nlohmann::json& j, const DyadicCube& cube);
void from_json(const nlohmann::json& j, DyadicCube& cube);
void to_json(nlohmann::json& j, const CubeFamily& family);
void from_json(const nlohmann::json& j, CubeFamily& family);

}  // namespace hlab::dyadic
