#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"

#include "hlab/bessel.hpp"
#include "hlab/dyadic.hpp"
#include "hlab/errors.hpp"
#include "hlab/grid.hpp"
#include "hlab/operators.hpp"
#include "hlab/rng.hpp"
#include "hlab/synth.hpp"

using namespace hlab;
using namespace hlab::ops;
using grid::GridFunction;
using grid::make_grid;

namespace {

GridFunction indicator_1d(std::array<double, 2> corner, double side, int cells, double lo,
                          double hi) {
  GridFunction f = make_grid(1, corner, side, cells, 0.0);
  for (int i = 0; i < cells; ++i) {
    const double c = f.center(0, i);
    if (c >= lo && c <= hi) f.values[i] = 1.0;
  }
  return f;
}

dyadic::DyadicCube cube1(int level, std::int64_t c) {
  return dyadic::DyadicCube{level, {c}};
}

}  // namespace

TEST_CASE("maximal function of a constant") {
  const GridFunction f = make_grid(1, {0.0, 0.0}, 2.0, 64, 3.0);
  const GridFunction m = maximal(f, 0.0);
  for (double v : m.values) CHECK(v == doctest::Approx(3.0).epsilon(1e-12));

  // In 2-d the half-step radius overshoots a constant by at most 4/pi.
  const GridFunction f2 = make_grid(2, {0.0, 0.0}, 1.0, 32, 2.0);
  const GridFunction m2 = maximal(f2, 0.0);
  for (double v : m2.values) {
    CHECK(v >= 2.0 - 1e-12);
    CHECK(v <= 2.0 * 4.0 / 3.141592653589793 + 1e-9);
  }
}

TEST_CASE("maximal function of a unit indicator at distance two") {
  // sup_r over the window around x = 2 of the average of 1_[0,1] peaks at
  // r = 2 where the window captures the full unit of mass: value 1/4.
  const GridFunction g = indicator_1d({0.0, 0.0}, 4.0, 256, 0.0, 1.0);
  const GridFunction m = maximal(g, 0.0);
  const double x[] = {2.0};
  CHECK(m.value_at(x) == doctest::Approx(0.25).epsilon(0.08));
  CHECK(std::fabs(m.value_at(x) - 0.25) <= 0.02);

  // The fractional version multiplies the peak average by r^beta = 2^0.5.
  const GridFunction mh = maximal(g, 0.5);
  CHECK(std::fabs(mh.value_at(x) - std::sqrt(2.0) * 0.25) <= 0.02);
}

TEST_CASE("maximal function dominates the function and is sublinear") {
  Rng rng = seeded_rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const int dim = trial % 2 == 0 ? 1 : 2;
    const int cells = dim == 1 ? 128 : 24;
    const GridFunction f = synth::random_grid(rng, dim, {-1.0, -1.0}, 2.0, cells, -2.0, 2.0);
    const GridFunction g = synth::random_grid(rng, dim, {-1.0, -1.0}, 2.0, cells, -2.0, 2.0);
    const GridFunction mf = maximal(f, 0.0);
    const GridFunction mg = maximal(g, 0.0);
    GridFunction sum = f;
    for (std::size_t i = 0; i < sum.values.size(); ++i) sum.values[i] += g.values[i];
    const GridFunction msum = maximal(sum, 0.0);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      CHECK(mf.values[i] >= std::fabs(f.values[i]) - 1e-12);
      CHECK(msum.values[i] <= mf.values[i] + mg.values[i] + 1e-12);
    }
  }
}

TEST_CASE("maximal order validation and the truncated variant") {
  const GridFunction f = make_grid(1, {0.0, 0.0}, 1.0, 16, 1.0);
  CHECK_THROWS_AS(maximal(f, -0.1), DomainError);
  CHECK_THROWS_AS(maximal(f, 1.0), DomainError);   // order must stay below dim
  CHECK_THROWS_AS(maximal_truncated(f, -1.0), DomainError);
  CHECK_NOTHROW(maximal_truncated(f, 1.0));        // radius cap keeps this finite
  const GridFunction mt = maximal_truncated(f, 2.5);
  for (double v : mt.values) CHECK(std::isfinite(v));
  // Both variants agree below the dimension.
  const GridFunction a = maximal(f, 0.5);
  const GridFunction b = maximal_truncated(f, 0.5);
  for (std::size_t i = 0; i < a.values.size(); ++i)
    CHECK(a.values[i] == doctest::Approx(b.values[i]).epsilon(1e-12));
}

TEST_CASE("riesz potential of an indicator at the origin") {
  // int_{-1}^{1} |y|^(-1/2) dy = 4.
  const GridFunction g = indicator_1d({-2.0, 0.0}, 4.0, 1024, -1.0, 1.0);
  const GridFunction v = riesz_potential(g, 0.5);
  const double x[] = {0.0};
  CHECK(std::fabs(v.value_at(x) - 4.0) <= 0.01);
}

TEST_CASE("riesz potential in the plane against the exact square integral") {
  // int over the unit square of |y - center|^(-1) dy = 4 ln(1 + sqrt 2)
  // (eight polar wedges of half-width 1/2).
  const GridFunction g = make_grid(2, {0.0, 0.0}, 1.0, 64, 1.0);
  const GridFunction v = riesz_potential(g, 1.0);
  const double x[] = {0.5, 0.5};
  CHECK(v.value_at(x) ==
        doctest::Approx(4.0 * std::log(1.0 + std::sqrt(2.0))).epsilon(0.01));
}

TEST_CASE("riesz potential is linear, positive, and validated") {
  Rng rng = seeded_rng(37);
  const GridFunction f = synth::random_grid(rng, 1, {0.0, 0.0}, 1.0, 128, -1.0, 1.0);
  const GridFunction g = synth::random_grid(rng, 1, {0.0, 0.0}, 1.0, 128, 0.0, 1.0);
  const GridFunction vf = riesz_potential(f, 0.5);
  const GridFunction vg = riesz_potential(g, 0.5);
  GridFunction combo = f;
  for (std::size_t i = 0; i < combo.values.size(); ++i)
    combo.values[i] = 2.0 * f.values[i] - 3.0 * g.values[i];
  const GridFunction vc = riesz_potential(combo, 0.5);
  for (std::size_t i = 0; i < vc.values.size(); ++i) {
    CHECK(vc.values[i] ==
          doctest::Approx(2.0 * vf.values[i] - 3.0 * vg.values[i]).epsilon(1e-9));
    CHECK(vg.values[i] >= 0.0);  // nonnegative data, nonnegative potential
  }
  const GridFunction zero = make_grid(1, {0.0, 0.0}, 1.0, 32, 0.0);
  const GridFunction vz = riesz_potential(zero, 0.5);
  for (double v : vz.values) CHECK(v == 0.0);
  CHECK_THROWS_AS(riesz_potential(f, 0.0), DomainError);
  CHECK_THROWS_AS(riesz_potential(f, 1.0), DomainError);
  CHECK_THROWS_AS(riesz_potential(f, -0.5), DomainError);
}

TEST_CASE("bessel kernel weights carry unit mass") {
  for (double alpha : {0.5, 1.5}) {
    const KernelSpec spec{KernelSpec::Kind::bessel, alpha, 1, 1e-8};
    const double h = 1.0 / 32.0;
    const int reach = 32 * 30;  // radius 30, tail below 1e-12
    const auto table = kernel_weight_table(spec, h, reach);
    REQUIRE(table->size() == static_cast<std::size_t>(reach) + 1);
    double mass = (*table)[0];
    for (int k = 1; k <= reach; ++k) mass += 2.0 * (*table)[k];
    CHECK(std::fabs(mass - 1.0) <= 1e-3);
  }
}

TEST_CASE("bessel kernel short-range power behaviour and long-range decay") {
  const KernelSpec half{KernelSpec::Kind::bessel, 0.5, 1, 1e-8};
  std::vector<double> scaled;
  for (double r : {1e-1, 1e-2, 1e-3, 1e-4})
    scaled.push_back(bessel_kernel(half, r) * std::pow(r, 1.0 - 0.5));
  for (double q : scaled) {
    CHECK(q > 0.0);
    CHECK(std::isfinite(q));
  }
  const double qmax = *std::max_element(scaled.begin(), scaled.end());
  const double qmin = *std::min_element(scaled.begin(), scaled.end());
  CHECK(qmax <= 3.0 * qmin);  // bounded, no residual blow-up

  const KernelSpec smooth{KernelSpec::Kind::bessel, 1.5, 1, 1e-8};
  // Above the ambient dimension the kernel stays bounded at the origin.
  CHECK(bessel_kernel(smooth, 1e-4) <= bessel_kernel(smooth, 1e-3) * 1.2 + 1e-12);
  // Exponential-type decay at range.
  for (const auto& spec : {half, smooth})
    CHECK(bessel_kernel(spec, 2.0) < bessel_kernel(spec, 1.0) * std::exp(-0.5));
}

TEST_CASE("bessel potential of the constant one is one in the interior") {
  GridFunction one = make_grid(1, {-8.0, 0.0}, 16.0, 1024, 1.0);
  const GridFunction v = bessel_potential(one, 1.5);
  const double x[] = {0.0};
  CHECK(std::fabs(v.value_at(x) - 1.0) <= 1e-3);
  const double y[] = {1.0};
  CHECK(std::fabs(v.value_at(y) - 1.0) <= 1e-3);
}

TEST_CASE("bessel potential is bounded, positive, and smoothing") {
  Rng rng = seeded_rng(41);
  GridFunction g = make_grid(1, {-4.0, 0.0}, 8.0, 512, 0.0);
  // Support well inside the box so zero extension matches the discrete sums.
  for (int i = 128; i < 384; ++i) g.values[i] = uniform(rng, -1.0, 1.0);
  const GridFunction v = bessel_potential(g, 1.2);
  CHECK(grid::max_abs(v) <= grid::max_abs(g) * (1.0 + 1e-2));
  CHECK(grid::total_variation_1d(v) <= grid::total_variation_1d(g) * (1.0 + 1e-9));

  const GridFunction zero = make_grid(1, {0.0, 0.0}, 1.0, 64, 0.0);
  const GridFunction vz = bessel_potential(zero, 1.0);
  for (double val : vz.values) CHECK(val == 0.0);

  GridFunction pos = grid::abs(g);
  const GridFunction vp = bessel_potential(pos, 1.2);
  for (double val : vp.values) CHECK(val >= 0.0);
}

TEST_CASE("cube-restricted integrals and norms") {
  const GridFunction f = make_grid(1, {0.0, 0.0}, 1.0, 64, 2.5);
  const auto q = cube1(2, 1);  // [1/4, 1/2]
  CHECK(integral_on(f, q) == doctest::Approx(2.5 * 0.25).epsilon(1e-12));
  CHECK(lp_norm_on(f, q, 3.0) ==
        doctest::Approx(2.5 * std::pow(0.25, 1.0 / 3.0)).epsilon(1e-12));

  const GridFunction r = restrict_to_cube(f, q);
  double total = 0.0;
  for (double v : r.values) total += v * f.h();
  CHECK(total == doctest::Approx(2.5 * 0.25).epsilon(1e-12));

  // Affine field: the grid diameter over a cube is side - h exactly.
  GridFunction lin = make_grid(1, {0.0, 0.0}, 1.0, 64, 0.0);
  for (int i = 0; i < 64; ++i) lin.values[i] = lin.center(0, i);
  CHECK(image_diameter_grid(lin, q) == doctest::Approx(0.25 - lin.h()).epsilon(1e-12));
}

TEST_CASE("local and far parts partition the function exactly") {
  Rng rng = seeded_rng(43);
  const GridFunction g = synth::random_grid(rng, 1, {0.0, 0.0}, 1.0, 64, -1.0, 1.0);
  const auto q = cube1(2, 1);  // [1/4, 1/2]; 2Q = [1/8, 5/8]
  const auto [local, far] = split_local_far(g, q);
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    CHECK(local.values[i] + far.values[i] == g.values[i]);
    CHECK((local.values[i] == 0.0 || far.values[i] == 0.0));
  }
  // Cells with centers inside the doubled cube land in the local part.
  for (int i = 0; i < 64; ++i) {
    const double c = g.center(0, i);
    if (c >= 0.125 && c < 0.625) {
      CHECK(local.values[i] == g.values[i]);
    } else {
      CHECK(far.values[i] == g.values[i]);
    }
  }
  // An edge cube clips the doubled cube at the box.
  const auto edge = split_local_far(g, cube1(1, 1));
  for (std::size_t i = 0; i < g.values.size(); ++i)
    CHECK(edge.first.values[i] + edge.second.values[i] == g.values[i]);
  // A cube at the grid step is too small to double.
  CHECK_THROWS_AS(split_local_far(g, cube1(6, 3)), DomainError);
}

TEST_CASE("local integral comparison against the maximal function on the core cube") {
  // For positive g, the near-field potential over 2Q is controlled by the
  // potential of (Mg) restricted to Q, with one stable empirical constant.
  const double alpha = 0.5;
  double max_ratio_coarse = 0.0, max_ratio_fine = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    Rng rng = trial_rng(77, trial);
    const int level = static_cast<int>(uniform_int(rng, 2, 3));
    const std::int64_t cmax = (std::int64_t{1} << level) - 2;
    const std::int64_t coord = uniform_int(rng, 1, cmax);
    const auto q = cube1(level, coord);
    GridFunction g = synth::random_grid(rng, 1, {0.0, 0.0}, 1.0, 128, 0.0, 2.0);
    for (int pass = 0; pass < 2; ++pass) {
      const auto range = dyadic::cells_in_cube(g, q);
      const int node = (range.lo[0] + range.hi[0]) / 2;
      const GridFunction local = split_local_far(g, q).first;
      const GridFunction lhs_grid = riesz_potential(local, alpha);
      const GridFunction rhs_grid =
          riesz_potential(restrict_to_cube(maximal(g, 0.0), q), alpha);
      const double lhs = lhs_grid.values[node];
      const double rhs = rhs_grid.values[node];
      REQUIRE(rhs > 0.0);
      double& slot = pass == 0 ? max_ratio_coarse : max_ratio_fine;
      slot = std::max(slot, lhs / rhs);
      g = g.refined();
    }
  }
  CHECK(max_ratio_coarse > 0.0);
  CHECK(std::isfinite(max_ratio_fine));
  const double drift = max_ratio_fine / max_ratio_coarse;
  CHECK(drift > 0.5);
  CHECK(drift < 2.0);
}

TEST_CASE("besov modulus of an affine map vanishes") {
  GridFunction lin = make_grid(1, {-1.0, 0.0}, 2.0, 128, 0.0);
  for (int i = 0; i < 128; ++i) lin.values[i] = 3.0 * lin.center(0, i) - 1.0;
  const GridFunction om = besov_modulus(lin, 1, 0.25);
  for (double v : om.values) CHECK(std::fabs(v) <= 1e-10);

  GridFunction plane = make_grid(2, {0.0, 0.0}, 1.0, 32, 0.0);
  for (int iy = 0; iy < 32; ++iy)
    for (int ix = 0; ix < 32; ++ix)
      plane.at(ix, iy) = plane.center(0, ix) + 2.0 * plane.center(1, iy);
  const GridFunction om2 = besov_modulus(plane, 1, 0.25);
  for (double v : om2.values) CHECK(std::fabs(v) <= 1e-10);

  // Quadratic fields have constant second gradient.
  GridFunction quad = make_grid(1, {-1.0, 0.0}, 2.0, 128, 0.0);
  for (int i = 0; i < 128; ++i) {
    const double x = quad.center(0, i);
    quad.values[i] = 0.5 * x * x;
  }
  const GridFunction om3 = besov_modulus(quad, 2, 0.25);
  for (double v : om3.values) CHECK(std::fabs(v) <= 1e-9);
}

TEST_CASE("besov modulus of the parabola is t over four at interior nodes") {
  GridFunction quad = make_grid(1, {-1.0, 0.0}, 2.0, 256, 0.0);
  for (int i = 0; i < 256; ++i) {
    const double x = quad.center(0, i);
    quad.values[i] = 0.5 * x * x;
  }
  const double h = quad.h();
  for (double t : {0.25, 0.125}) {
    const GridFunction om = besov_modulus(quad, 1, t);
    for (int i = 64; i < 192; ++i) CHECK(std::fabs(om.values[i] - t / 4.0) <= h);
  }
}

TEST_CASE("besov modulus window validation") {
  const GridFunction f = make_grid(1, {0.0, 0.0}, 1.0, 64, 0.0);
  CHECK_THROWS_AS(besov_modulus(f, 1, 0.013), DomainError);  // not a step multiple
  CHECK_THROWS_AS(besov_modulus(f, 1, 0.0), DomainError);
  CHECK_THROWS_AS(besov_modulus(f, 3, 0.25), DomainError);
  CHECK_THROWS_AS(besov_modulus(f, 0, 0.25), DomainError);
  CHECK_THROWS_AS(besov_modulus_norm(f, 1, 0.25, 0.0), DomainError);
}

TEST_CASE("besov norm slope recovers the holder exponent of the gradient") {
  // Synthesize v so that its discrete gradient is a lacunary cosine series of
  // known Holder exponent; the modulus norm then scales like t^alpha.
  const int cells = 4096;
  const double h = 2.0 / cells;
  for (double alpha : {0.3, 0.7}) {
    std::vector<double> w(cells);
    for (int i = 0; i < cells; ++i) {
      const double x = -1.0 + (i + 0.5) * h;
      double acc = 0.0;
      for (int m = 0; m <= 11; ++m)
        acc += std::pow(2.0, -m * alpha) * std::cos(std::pow(2.0, m) * x);
      w[i] = acc;
    }
    GridFunction v = make_grid(1, {-1.0, 0.0}, 2.0, cells, 0.0);
    double cum = 0.0;
    for (int i = 0; i < cells; ++i) {
      cum += w[i] * h;
      v.values[i] = cum;
    }
    std::vector<double> xs, ys;
    for (int j = 3; j <= 7; ++j) {
      const double t = std::pow(2.0, -j);
      const double norm = besov_modulus_norm(v, 1, t, 3.0);
      REQUIRE(norm > 0.0);
      xs.push_back(std::log2(t));
      ys.push_back(std::log2(norm));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double k = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
    }
    const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    CHECK(std::fabs(slope - alpha) <= 0.1);
  }
}

TEST_CASE("trace ratio hypotheses") {
  const auto mu = dyadic::frostman_measure(
      dyadic::CubeFamily{{cube1(0, 0)}, 1.0}, 1.0);
  const GridFunction g = make_grid(1, {0.0, 0.0}, 1.0, 64, 1.0);
  CHECK_THROWS_AS(adams_ratio(g, mu, 0.25, 1.0, 2.0, AdamsMode::riesz), RegimeError);
  CHECK_THROWS_AS(adams_ratio(g, mu, 0.6, 2.0, 3.0, AdamsMode::riesz), RegimeError);
  CHECK_THROWS_AS(adams_ratio(g, mu, 0.25, 2.0, 2.0, AdamsMode::riesz), RegimeError);
  CHECK_THROWS_AS(adams_ratio(g, mu, 0.25, 2.0, 1.5, AdamsMode::maximal), RegimeError);
  CHECK_THROWS_AS(adams_ratio(g, mu, 0.25, 2.0, 2.5, AdamsMode::lorentz), RegimeError);
  CHECK_NOTHROW(adams_ratio(g, mu, 0.25, 2.0, 2.5, AdamsMode::riesz));
  CHECK_NOTHROW(adams_ratio(g, mu, 0.25, 2.0, 2.0, AdamsMode::maximal));
  CHECK_NOTHROW(adams_ratio(g, mu, 0.25, 2.0, 2.0, AdamsMode::lorentz));
}

TEST_CASE("trace ratio vanishes on zero data and ignores rescaling") {
  const auto mu = dyadic::frostman_measure(
      dyadic::CubeFamily{{cube1(1, 0), cube1(2, 2)}, 0.8}, 0.8);
  const GridFunction zero = make_grid(1, {0.0, 0.0}, 1.0, 64, 0.0);
  for (auto mode : {AdamsMode::riesz, AdamsMode::maximal, AdamsMode::lorentz}) {
    const double s = mode == AdamsMode::riesz ? 2.5 : 2.0;
    CHECK(adams_ratio(zero, mu, 0.25, 2.0, s, mode) == 0.0);
  }
  Rng rng = seeded_rng(53);
  const GridFunction g = synth::random_grid(rng, 1, {0.0, 0.0}, 1.0, 64, 0.0, 1.0);
  GridFunction g5 = grid::transformed(g, [](double v) { return 5.0 * v; });
  for (auto mode : {AdamsMode::riesz, AdamsMode::maximal, AdamsMode::lorentz}) {
    const double s = mode == AdamsMode::riesz ? 2.5 : 2.0;
    const double r1 = adams_ratio(g, mu, 0.25, 2.0, s, mode);
    const double r5 = adams_ratio(g5, mu, 0.25, 2.0, s, mode);
    CHECK(r1 > 0.0);
    CHECK(r5 == doctest::Approx(r1).epsilon(1e-9));
  }
}

TEST_CASE("trace ratio reference configuration is stable under refinement") {
  // n=1, alpha=0.25, p=2, s=2.5 with Lebesgue measure on the unit interval.
  const auto mu = dyadic::frostman_measure(
      dyadic::CubeFamily{{cube1(0, 0)}, 1.0}, 1.0);
  Rng rng = seeded_rng(59);
  const GridFunction g = synth::random_grid(rng, 1, {0.0, 0.0}, 1.0, 64, 0.0, 1.0);
  const double coarse = adams_ratio(g, mu, 0.25, 2.0, 2.5, AdamsMode::riesz);
  const double fine = adams_ratio(g.refined(), mu, 0.25, 2.0, 2.5, AdamsMode::riesz);
  CHECK(coarse > 0.0);
  CHECK(fine / coarse > 0.5);
  CHECK(fine / coarse < 2.0);
}

TEST_CASE("oscillation bound hypotheses") {
  const GridFunction g = make_grid(1, {-2.0, 0.0}, 4.0, 256, 1.0);
  const auto q = cube1(2, 0);
  CHECK_THROWS_AS(diam_bound_check(g, q, 1.0, 3.0, 0.5, DiamMode::riesz), RegimeError);
  CHECK_THROWS_AS(diam_bound_check(g, q, 0.8, 1.2, 0.5, DiamMode::riesz), RegimeError);
  CHECK_THROWS_AS(diam_bound_check(g, q, 2.0, 3.0, 0.0, DiamMode::maximal), RegimeError);
  CHECK_THROWS_AS(diam_bound_check(g, q, 0.4, 3.0, 0.5, DiamMode::maximal), RegimeError);
  CHECK_THROWS_AS(diam_bound_check(g, q, 2.0, 0.9, 0.5, DiamMode::riesz), RegimeError);
  CHECK_THROWS_AS(diam_bound_check(g, cube1(-1, 0), 2.0, 3.0, 0.5, DiamMode::riesz),
                  DomainError);  // side above one
  CHECK_NOTHROW(diam_bound_check(g, q, 2.0, 3.0, 0.5, DiamMode::riesz));
  CHECK_NOTHROW(diam_bound_check(g, q, 2.0, 3.0, 0.5, DiamMode::maximal));
  CHECK_NOTHROW(diam_bound_check(g, q, 2.0, 3.0, 0.5, DiamMode::lorentz));
}

TEST_CASE("oscillation bound on zero data and translation invariance") {
  const GridFunction zero = make_grid(1, {-2.0, 0.0}, 4.0, 256, 0.0);
  const auto res = diam_bound_check(zero, cube1(2, 0), 2.0, 3.0, 0.5, DiamMode::riesz);
  CHECK(res.lhs == 0.0);
  CHECK(res.ratio == 0.0);

  Rng rng = seeded_rng(61);
  GridFunction g = make_grid(1, {-2.0, 0.0}, 4.0, 256, 0.0);
  // Support inside [-1.5, 1.5]: translation by one cube side never clips.
  for (int i = 32; i < 208; ++i) g.values[i] = uniform(rng, -1.0, 1.0);
  GridFunction shifted = make_grid(1, {-2.0, 0.0}, 4.0, 256, 0.0);
  for (int i = 32; i < 208; ++i) shifted.values[i + 16] = g.values[i];
  for (auto mode : {DiamMode::riesz, DiamMode::maximal, DiamMode::lorentz}) {
    const auto base = diam_bound_check(g, cube1(2, 0), 2.0, 3.0, 0.5, mode);
    const auto moved = diam_bound_check(shifted, cube1(2, 1), 2.0, 3.0, 0.5, mode);
    CHECK(base.lhs > 0.0);
    CHECK(base.rhs > 0.0);
    CHECK(moved.lhs == doctest::Approx(base.lhs).epsilon(1e-9));
    CHECK(moved.rhs == doctest::Approx(base.rhs).epsilon(1e-9));
    CHECK(moved.ratio == doctest::Approx(base.ratio).epsilon(1e-9));
  }
}

TEST_CASE("grid sampling, refinement, and csv round trip") {
  GridFunction lin = make_grid(1, {-1.0, 0.0}, 2.0, 64, 0.0);
  for (int i = 0; i < 64; ++i) lin.values[i] = 2.0 * lin.center(0, i) + 0.5;
  const double a[] = {0.33};
  CHECK(lin.sample_linear(a) == doctest::Approx(2.0 * 0.33 + 0.5).epsilon(1e-12));
  const double b[] = {-1.0};  // box edge: extrapolated from the fringe cells
  CHECK(lin.sample_linear(b) == doctest::Approx(-1.5).epsilon(1e-9));

  const GridFunction fine = lin.refined();
  CHECK(fine.cells == 128);
  CHECK(fine.h() == lin.h() / 2.0);
  const double c[] = {0.125};
  CHECK(fine.sample_linear(c) == doctest::Approx(lin.sample_linear(c)).epsilon(1e-12));

  std::stringstream ss;
  grid::write_csv(ss, lin);
  const GridFunction back = grid::read_csv(ss);
  CHECK(back.dim == lin.dim);
  CHECK(back.cells == lin.cells);
  CHECK(back.corner[0] == lin.corner[0]);
  CHECK(back.side == lin.side);
  CHECK(back.values == lin.values);
}
