#include "hlab/synth.hpp"

#include <cstdint>

#include "hlab/errors.hpp"

namespace hlab::synth {

using dyadic::CubeFamily;
using dyadic::DyadicCube;

namespace {

// Uniform descendant of `box` at `level` (level >= box.level).
DyadicCube descend(Rng& rng, const DyadicCube& box, int level) {
  const int shift = level - box.level;
  DyadicCube out;
  out.level = level;
  out.coords.resize(box.coords.size());
  for (std::size_t i = 0; i < box.coords.size(); ++i) {
    const std::int64_t span = std::int64_t{1} << shift;
    out.coords[i] = (box.coords[i] << shift) + uniform_int(rng, 0, span - 1);
  }
  return out;
}

}  // namespace

CubeFamily random_family(Rng& rng, int dim, int max_level, int count, double tau,
                         int root_exponent) {
  if (max_level < 0) throw DomainError("max_level must be nonnegative");
  DyadicCube root;
  root.level = -root_exponent;
  root.coords.assign(dim, -1);
  DyadicCube hotspot = descend(rng, root, 2);

  CubeFamily family;
  family.tau = tau;
  family.cubes.reserve(count);
  for (int i = 0; i < count; ++i) {
    const bool clustered = uniform01(rng) < 0.7;
    const DyadicCube& box = clustered ? hotspot : root;
    const int level = uniform_int(rng, std::max(box.level, 0), max_level);
    family.cubes.push_back(descend(rng, box, level));
  }
  return family;
}

CubeFamily random_family_in_unit_box(Rng& rng, int dim, int max_level, int count,
                                     double tau) {
  if (max_level < 0) throw DomainError("max_level must be nonnegative");
  DyadicCube unit;
  unit.level = 0;
  unit.coords.assign(dim, 0);
  CubeFamily family;
  family.tau = tau;
  family.cubes.reserve(count);
  for (int i = 0; i < count; ++i)
    family.cubes.push_back(descend(rng, unit, uniform_int(rng, 1, max_level)));
  return family;
}

DyadicCube random_cube_in_root(Rng& rng, int dim, int level_lo, int level_hi,
                               int root_exponent) {
  if (level_lo < -root_exponent || level_hi < level_lo)
    throw DomainError("invalid level range");
  DyadicCube root;
  root.level = -root_exponent;
  root.coords.assign(dim, -1);
  const int level = uniform_int(rng, level_lo, level_hi);
  return descend(rng, root, level);
}

DyadicCube random_cube_in_sym_box(Rng& rng, int dim, int level_lo, int level_hi) {
  if (level_lo < 0 || level_hi < level_lo) throw DomainError("invalid level range");
  DyadicCube orthant;
  orthant.level = 0;
  orthant.coords.resize(dim);
  for (int i = 0; i < dim; ++i) orthant.coords[i] = uniform01(rng) < 0.5 ? -1 : 0;
  return descend(rng, orthant, uniform_int(rng, level_lo, level_hi));
}

grid::GridFunction random_grid(Rng& rng, int dim, std::array<double, 2> corner, double side,
                               int cells, double lo, double hi) {
  grid::GridFunction g = grid::make_grid(dim, corner, side, cells);
  for (double& v : g.values) v = uniform(rng, lo, hi);
  return g;
}

}  // namespace hlab::synth
