#pragma once
#include <utility>

#include "hlab/dyadic.hpp"
#include "hlab/grid.hpp"

namespace hlab::ops {

using dyadic::DyadicCube;
using dyadic::FrostmanMeasure;
using grid::GridFunction;

// Fractional maximal function M_beta f(x) = sup_r r^beta * avg_{B(x,r)} |f|,
// f extended by zero outside the box, the supremum taken over the geometric
// radius ladder {h/2, h, 2h, 4h, ..., diam(box)}. The leading half-step
// radius isolates the cell itself, so M_beta f >= |f| pointwise.
GridFunction maximal(const GridFunction& f, double beta);  // requires 0 <= beta < dim

// Same ladder, but beta may reach or exceed the ambient dimension: the cap
// at the box diameter keeps the supremum finite where the untruncated
// operator would be identically infinite.
GridFunction maximal_truncated(const GridFunction& f, double beta);

// Riesz potential I_beta f(x) = int f(y) |y - x|^(beta - n) dy as a discrete
// convolution; the kernel is integrated exactly over cells in 1-d and over
// the singular cell by a polar rule in 2-d. Requires 0 < beta < dim.
GridFunction riesz_potential(const GridFunction& f, double beta);

double integral_on(const GridFunction& f, const DyadicCube& q);
double lp_norm_on(const GridFunction& f, const DyadicCube& q, double p);
GridFunction restrict_to_cube(const GridFunction& f, const DyadicCube& q);
double image_diameter_grid(const GridFunction& v, const DyadicCube& q);  // max - min over q

// g restricted to the doubled cube 2Q and to its complement; the two parts
// sum to g cell-exactly. Requires side(Q) >= 2h so 2Q stays grid-aligned.
std::pair<GridFunction, GridFunction> split_local_far(const GridFunction& g,
                                                      const DyadicCube& q);

// Mean oscillation of the discrete k-th gradient over the cube of side t
// centered at each node. Nodes whose window or difference stencil leaves the
// box are reported as zero and skipped by the norm below.
GridFunction besov_modulus(const GridFunction& v, int k, double t);
double besov_modulus_norm(const GridFunction& v, int k, double t, double p);

enum class AdamsMode { riesz, maximal, lorentz };
const char* to_string(AdamsMode mode);

// Trace-inequality ratio
//   int |T_alpha g|^s dmu  /  ( |||mu|||_beta * ||g||^s )
// with T = Riesz potential (s > p, beta = (s/p)(n - alpha p)),
// T = fractional maximal (s >= p, same beta), or the Lorentz endpoint
// (s = p, beta = n - alpha p, ||g|| in L_{p,1}). Requires n - alpha p > 0.
double adams_ratio(const GridFunction& g, const FrostmanMeasure& mu, double alpha,
                   double p, double s, AdamsMode mode);

enum class DiamMode { riesz, maximal, lorentz };
const char* to_string(DiamMode mode);

struct DiamBound {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  // 0 when lhs vanishes
};

// Oscillation bound for v = Bessel potential of g on a dyadic cube Q of side
// r, against the mode-specific right-hand side:
//   riesz:    ||Mg||_{L^p(Q)} r^(alpha - n/p) + r^(1-n)       int_Q I_{alpha-1}|g|
//   maximal:  ||Mg||_{L^p(Q)} r^(alpha - n/p) + r^(1-n-theta) int_Q M_{alpha-1+theta}|g|
//   lorentz:  ||Mg||_{L_{p,1}(Q)} r^(alpha - n/p) + the maximal-mode term
DiamBound diam_bound_check(const GridFunction& g, const DyadicCube& q, double alpha,
                           double p, double theta, DiamMode mode);

}  // namespace hlab::ops
