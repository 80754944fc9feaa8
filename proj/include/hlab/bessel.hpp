#pragma once
#include <memory>
#include <vector>

#include "hlab/grid.hpp"

namespace hlab::ops {

// Convolution kernel description; also the cache key for tabulated cell
// weights (kind, order, dim, grid step, quadrature tolerance).
struct KernelSpec {
  enum class Kind { bessel, riesz };
  Kind kind = Kind::bessel;
  double order = 1.0;  // alpha for bessel, beta for riesz
  int dim = 1;
  double quadrature_tolerance = 1e-8;
};

// Bessel kernel K_alpha at a positive radius, via the subordination integral
//   K_alpha(x) = (4 pi)^(-alpha/2) / Gamma(alpha/2)
//                * int_0^inf exp(-pi |x|^2 / t) exp(-t / (4 pi)) t^((alpha-n)/2) dt/t,
// whose Fourier transform is (1 + 4 pi^2 |xi|^2)^(-alpha/2); total mass 1.
double bessel_kernel(const KernelSpec& spec, double radius);

// Cell-integrated convolution weights for offsets 0..max_offset (1-d) or the
// quarter table (di, dj) in 0..max_offset (2-d, flattened row-major). The
// singular cell is integrated semi-analytically. Tables are memoized in
// process and persisted under $HLAB_CACHE_DIR when set; a table is reused
// only when every key component matches.
std::shared_ptr<const std::vector<double>> kernel_weight_table(const KernelSpec& spec,
                                                               double h, int max_offset);

// v = K_alpha * g on g's grid, zero extension outside the box.
grid::GridFunction bessel_potential(const grid::GridFunction& g, double alpha,
                                    double tolerance = 1e-8);

}  // namespace hlab::ops
