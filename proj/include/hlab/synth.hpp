#pragma once
#include <array>

#include "hlab/dyadic.hpp"
#include "hlab/grid.hpp"
#include "hlab/rng.hpp"

namespace hlab::synth {

// Seeded random fixtures shared by the property tests and the trial-based
// stability checks. All draws are deterministic functions of the Rng state.

// Random family anywhere in the root cube, clustered around a hotspot so that
// regularization has duplicates and packing violations to work on.
dyadic::CubeFamily random_family(Rng& rng, int dim, int max_level, int count, double tau,
                                 int root_exponent = dyadic::kDefaultRootExponent);

// Random family of cubes contained in [0,1]^dim (levels >= 0).
dyadic::CubeFamily random_family_in_unit_box(Rng& rng, int dim, int max_level, int count,
                                             double tau);

// Random dyadic cube inside the root cube, level uniform in [level_lo, level_hi].
dyadic::DyadicCube random_cube_in_root(Rng& rng, int dim, int level_lo, int level_hi,
                                       int root_exponent = dyadic::kDefaultRootExponent);

// Random dyadic cube inside [-1,1]^dim (an orthant cube at level 0, then a
// uniform descendant), level uniform in [level_lo, level_hi], both >= 0.
dyadic::DyadicCube random_cube_in_sym_box(Rng& rng, int dim, int level_lo, int level_hi);

// Grid over the given box with i.i.d. uniform values in [lo, hi].
grid::GridFunction random_grid(Rng& rng, int dim, std::array<double, 2> corner, double side,
                               int cells, double lo, double hi);

}  // namespace hlab::synth
