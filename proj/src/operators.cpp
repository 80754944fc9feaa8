#include "hlab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hlab/bessel.hpp"
#include "hlab/errors.hpp"
#include "hlab/fractal.hpp"

namespace hlab::ops {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Interpolated prefix sum: integral of the piecewise-constant |f| from the
// left box edge to position t measured in cell units, clamped to the box.
// prefix[k] holds the sum of the first k cell values.
double prefix_at(const double* prefix, int n, double t) {
  if (t <= 0.0) return 0.0;
  if (t >= static_cast<double>(n)) return prefix[n];
  const int k = static_cast<int>(t);
  return prefix[k] + (t - k) * (prefix[k + 1] - prefix[k]);
}

GridFunction maximal_impl(const GridFunction& f, double beta) {
  const int n = f.cells;
  const double h = f.h();
  const double diam = f.diameter();
  GridFunction out = f;

  if (f.dim == 1) {
    // Window integrals are exact for the piecewise-constant extension-by-zero
    // of f, and the normalization is the full window measure 2r, so an
    // average never exceeds max |f|; the half-step rung reproduces the cell
    // value itself, giving M f >= |f| pointwise.
    std::vector<double> prefix(n + 1, 0.0);
    for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + std::fabs(f.values[i]);
    for (int i = 0; i < n; ++i) {
      const double cx = i + 0.5;  // cell center in cell units
      double best = 0.0;
      for (double r = 0.5 * h;; r *= 2.0) {
        const double rc = r / h;
        const double mass =
            (prefix_at(prefix.data(), n, cx + rc) - prefix_at(prefix.data(), n, cx - rc)) * h;
        best = std::max(best, std::pow(r, beta) * mass / (2.0 * r));
        if (r >= diam) break;
      }
      out.values[i] = best;
    }
    return out;
  }

  // 2-d: disk integrals row by row, exact in the x direction through the
  // interpolated prefix sums and midpoint in y. The normalizing measure is
  // the same row quadrature applied to the constant 1, so constants are
  // reproduced exactly and the half-step rung isolates the cell.
  std::vector<double> prefix(static_cast<std::size_t>(n) * (n + 1), 0.0);
  for (int iy = 0; iy < n; ++iy) {
    double acc = 0.0;
    for (int ix = 0; ix < n; ++ix) {
      acc += std::fabs(f.at(ix, iy));
      prefix[static_cast<std::size_t>(iy) * (n + 1) + ix + 1] = acc;
    }
  }
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const double cx = ix + 0.5;
      double best = 0.0;
      for (double r = 0.5 * h;; r *= 2.0) {
        const int reach = static_cast<int>(std::floor(r / h + 1e-12));
        double mass = 0.0;
        double measure = 0.0;
        for (int dy = -reach; dy <= reach; ++dy) {
          const double rem = r * r - static_cast<double>(dy) * dy * h * h;
          if (rem <= 0.0) continue;
          const double half_width = std::sqrt(rem);  // disk slice half-width
          measure += 2.0 * half_width * h;
          const int jy = iy + dy;
          if (jy < 0 || jy >= n) continue;  // zero extension outside the box
          const double* row = prefix.data() + static_cast<std::size_t>(jy) * (n + 1);
          const double wc = half_width / h;
          mass += (prefix_at(row, n, cx + wc) - prefix_at(row, n, cx - wc)) * h * h;
        }
        best = std::max(best, std::pow(r, beta) * mass / measure);
        if (r >= diam) break;
      }
      out.at(ix, iy) = best;
    }
  return out;
}

// Power-kernel convolution with exponent beta in (0, dim]; shared by the
// Riesz potential (strict beta < dim) and the boundary case beta == dim
// where the kernel is constant.
GridFunction power_potential(const GridFunction& f, double beta) {
  KernelSpec spec{KernelSpec::Kind::riesz, beta, f.dim, 1e-8};
  const auto w = kernel_weight_table(spec, f.h(), f.cells);
  GridFunction out = f;
  const int n = f.cells;
  if (f.dim == 1) {
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j)
        acc += (*w)[static_cast<std::size_t>(std::abs(i - j))] * f.values[j];
      out.values[i] = acc;
    }
  } else {
    const int stride = n + 1;
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        double acc = 0.0;
        for (int jy = 0; jy < n; ++jy) {
          const std::size_t row = static_cast<std::size_t>(std::abs(iy - jy)) * stride;
          for (int jx = 0; jx < n; ++jx) acc += (*w)[row + std::abs(ix - jx)] * f.at(jx, jy);
        }
        out.at(ix, iy) = acc;
      }
  }
  return out;
}

}  // namespace

const char* to_string(AdamsMode mode) {
  switch (mode) {
    case AdamsMode::riesz: return "riesz";
    case AdamsMode::maximal: return "maximal";
    case AdamsMode::lorentz: return "lorentz";
  }
  return "unknown";
}

const char* to_string(DiamMode mode) {
  switch (mode) {
    case DiamMode::riesz: return "riesz";
    case DiamMode::maximal: return "maximal";
    case DiamMode::lorentz: return "lorentz";
  }
  return "unknown";
}

GridFunction maximal(const GridFunction& f, double beta) {
  f.validate();
  if (beta < 0.0 || beta >= static_cast<double>(f.dim))
    throw DomainError("maximal order must lie in [0, dim)");
  return maximal_impl(f, beta);
}

GridFunction maximal_truncated(const GridFunction& f, double beta) {
  f.validate();
  if (beta < 0.0) throw DomainError("maximal order must be nonnegative");
  return maximal_impl(f, beta);
}

GridFunction riesz_potential(const GridFunction& f, double beta) {
  f.validate();
  if (!(beta > 0.0) || beta >= static_cast<double>(f.dim))
    throw DomainError("riesz order must lie in (0, dim)");
  return power_potential(f, beta);
}

double integral_on(const GridFunction& f, const DyadicCube& q) {
  const auto r = dyadic::cells_in_cube(f, q);
  const double cellvol = std::pow(f.h(), f.dim);
  double acc = 0.0;
  if (f.dim == 1) {
    for (int ix = r.lo[0]; ix < r.hi[0]; ++ix) acc += f.at(ix);
  } else {
    for (int iy = r.lo[1]; iy < r.hi[1]; ++iy)
      for (int ix = r.lo[0]; ix < r.hi[0]; ++ix) acc += f.at(ix, iy);
  }
  return acc * cellvol;
}

double lp_norm_on(const GridFunction& f, const DyadicCube& q, double p) {
  if (!(p > 0.0)) throw DomainError("p must be positive");
  const auto r = dyadic::cells_in_cube(f, q);
  const double cellvol = std::pow(f.h(), f.dim);
  double acc = 0.0;
  if (f.dim == 1) {
    for (int ix = r.lo[0]; ix < r.hi[0]; ++ix) acc += std::pow(std::fabs(f.at(ix)), p);
  } else {
    for (int iy = r.lo[1]; iy < r.hi[1]; ++iy)
      for (int ix = r.lo[0]; ix < r.hi[0]; ++ix) acc += std::pow(std::fabs(f.at(ix, iy)), p);
  }
  return std::pow(acc * cellvol, 1.0 / p);
}

GridFunction restrict_to_cube(const GridFunction& f, const DyadicCube& q) {
  const auto r = dyadic::cells_in_cube(f, q);
  GridFunction out = f;
  std::fill(out.values.begin(), out.values.end(), 0.0);
  if (f.dim == 1) {
    for (int ix = r.lo[0]; ix < r.hi[0]; ++ix) out.at(ix) = f.at(ix);
  } else {
    for (int iy = r.lo[1]; iy < r.hi[1]; ++iy)
      for (int ix = r.lo[0]; ix < r.hi[0]; ++ix) out.at(ix, iy) = f.at(ix, iy);
  }
  return out;
}

double image_diameter_grid(const GridFunction& v, const DyadicCube& q) {
  const auto r = dyadic::cells_in_cube(v, q);
  double lo = 0.0, hi = 0.0;
  bool first = true;
  const auto visit = [&](double val) {
    if (first) {
      lo = hi = val;
      first = false;
    } else {
      lo = std::min(lo, val);
      hi = std::max(hi, val);
    }
  };
  if (v.dim == 1) {
    for (int ix = r.lo[0]; ix < r.hi[0]; ++ix) visit(v.at(ix));
  } else {
    for (int iy = r.lo[1]; iy < r.hi[1]; ++iy)
      for (int ix = r.lo[0]; ix < r.hi[0]; ++ix) visit(v.at(ix, iy));
  }
  return first ? 0.0 : hi - lo;
}

std::pair<GridFunction, GridFunction> split_local_far(const GridFunction& g,
                                                      const DyadicCube& q) {
  g.validate();
  if (q.dim() != g.dim) throw DomainError("cube and grid dimensions differ");
  const double h = g.h();
  const double r = q.side();
  if (r < 2.0 * h - 1e-12)
    throw DomainError("split requires side(Q) >= 2h so the doubled cube stays aligned");
  GridFunction local = g, far = g;
  // Cell membership in 2Q by center, half-open on the upper side: the two
  // parts partition g exactly.
  const auto in_double = [&](int ix, int iy) {
    const int idx[2] = {ix, iy};
    for (int axis = 0; axis < g.dim; ++axis) {
      const double c = g.center(axis, idx[axis]);
      const double lo = q.min_corner(axis) - 0.5 * r;
      const double hi = q.max_corner(axis) + 0.5 * r;
      if (c < lo || c >= hi) return false;
    }
    return true;
  };
  const int n = g.cells;
  for (int iy = 0; iy < (g.dim == 2 ? n : 1); ++iy)
    for (int ix = 0; ix < n; ++ix) {
      if (in_double(ix, iy))
        far.at(ix, iy) = 0.0;
      else
        local.at(ix, iy) = 0.0;
    }
  return {std::move(local), std::move(far)};
}

namespace {

// Centered differences inside, one-sided at the box edges.
GridFunction derivative(const GridFunction& v, int axis) {
  GridFunction out = v;
  const int n = v.cells;
  const double h = v.h();
  if (v.dim == 1) {
    for (int i = 0; i < n; ++i) {
      if (i == 0)
        out.values[i] = n > 1 ? (v.values[1] - v.values[0]) / h : 0.0;
      else if (i == n - 1)
        out.values[i] = (v.values[n - 1] - v.values[n - 2]) / h;
      else
        out.values[i] = (v.values[i + 1] - v.values[i - 1]) / (2.0 * h);
    }
    return out;
  }
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      int i = axis == 0 ? ix : iy;
      double a, b, denom;
      if (i == 0) {
        a = axis == 0 ? v.at(ix + 1, iy) : v.at(ix, iy + 1);
        b = v.at(ix, iy);
        denom = h;
      } else if (i == n - 1) {
        a = v.at(ix, iy);
        b = axis == 0 ? v.at(ix - 1, iy) : v.at(ix, iy - 1);
        denom = h;
      } else {
        a = axis == 0 ? v.at(ix + 1, iy) : v.at(ix, iy + 1);
        b = axis == 0 ? v.at(ix - 1, iy) : v.at(ix, iy - 1);
        denom = 2.0 * h;
      }
      out.at(ix, iy) = (a - b) / denom;
    }
  return out;
}

// All order-k partial derivatives (unique multi-indices).
std::vector<GridFunction> gradient_components(const GridFunction& v, int k) {
  if (k < 1 || k > 2) throw DomainError("gradient order must be 1 or 2");
  std::vector<GridFunction> out;
  if (v.dim == 1) {
    GridFunction d = derivative(v, 0);
    if (k == 1) {
      out.push_back(std::move(d));
    } else {
      out.push_back(derivative(d, 0));
    }
    return out;
  }
  GridFunction dx = derivative(v, 0), dy = derivative(v, 1);
  if (k == 1) {
    out.push_back(std::move(dx));
    out.push_back(std::move(dy));
  } else {
    out.push_back(derivative(dx, 0));
    out.push_back(derivative(dx, 1));
    out.push_back(derivative(dy, 1));
  }
  return out;
}

}  // namespace

GridFunction besov_modulus(const GridFunction& v, int k, double t) {
  v.validate();
  const double h = v.h();
  const auto m = static_cast<int>(std::llround(t / h));
  if (m < 1 || std::fabs(t / h - m) > 1e-9)
    throw DomainError("window t must be a positive multiple of the grid step");
  const auto comps = gradient_components(v, k);
  const int n = v.cells;
  // Half-open window of m cells starting at offset lo relative to the node.
  const int lo = -(m / 2);
  // Stencil margin: k cells of one-sided differences are excluded.
  const int margin = k;

  GridFunction out = v;
  std::fill(out.values.begin(), out.values.end(), 0.0);
  const auto window_ok = [&](int i) {
    return i + lo >= margin && i + lo + m <= n - margin;
  };
  if (v.dim == 1) {
    for (int i = 0; i < n; ++i) {
      if (!window_ok(i)) continue;
      double osc = 0.0;
      std::vector<double> means(comps.size(), 0.0);
      for (std::size_t c = 0; c < comps.size(); ++c) {
        double mean = 0.0;
        for (int d = 0; d < m; ++d) mean += comps[c].values[i + lo + d];
        means[c] = mean / m;
      }
      for (int d = 0; d < m; ++d) {
        double norm2 = 0.0;
        for (std::size_t c = 0; c < comps.size(); ++c) {
          const double dev = comps[c].values[i + lo + d] - means[c];
          norm2 += dev * dev;
        }
        osc += std::sqrt(norm2);
      }
      out.values[i] = osc / m;
    }
    return out;
  }
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      if (!window_ok(ix) || !window_ok(iy)) continue;
      std::vector<double> means(comps.size(), 0.0);
      for (std::size_t c = 0; c < comps.size(); ++c) {
        double mean = 0.0;
        for (int dy = 0; dy < m; ++dy)
          for (int dx = 0; dx < m; ++dx) mean += comps[c].at(ix + lo + dx, iy + lo + dy);
        means[c] = mean / (static_cast<double>(m) * m);
      }
      double osc = 0.0;
      for (int dy = 0; dy < m; ++dy)
        for (int dx = 0; dx < m; ++dx) {
          double norm2 = 0.0;
          for (std::size_t c = 0; c < comps.size(); ++c) {
            const double dev = comps[c].at(ix + lo + dx, iy + lo + dy) - means[c];
            norm2 += dev * dev;
          }
          osc += std::sqrt(norm2);
        }
      out.at(ix, iy) = osc / (static_cast<double>(m) * m);
    }
  return out;
}

double besov_modulus_norm(const GridFunction& v, int k, double t, double p) {
  if (!(p > 0.0)) throw DomainError("p must be positive");
  const GridFunction omega = besov_modulus(v, k, t);
  const double h = v.h();
  const auto m = static_cast<int>(std::llround(t / h));
  const int lo = -(m / 2);
  const int margin = k;
  const int n = v.cells;
  const auto window_ok = [&](int i) {
    return i + lo >= margin && i + lo + m <= n - margin;
  };
  const double cellvol = std::pow(h, v.dim);
  double acc = 0.0;
  if (v.dim == 1) {
    for (int i = 0; i < n; ++i)
      if (window_ok(i)) acc += std::pow(omega.values[i], p) * cellvol;
  } else {
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix)
        if (window_ok(ix) && window_ok(iy))
          acc += std::pow(omega.at(ix, iy), p) * cellvol;
  }
  return std::pow(acc, 1.0 / p);
}

double adams_ratio(const GridFunction& g, const FrostmanMeasure& mu, double alpha,
                   double p, double s, AdamsMode mode) {
  g.validate();
  if (g.dim != mu.dim() && !mu.family().cubes().empty())
    throw DomainError("grid and measure dimensions differ");
  const double n = static_cast<double>(g.dim);
  if (!(p > 1.0)) throw RegimeError("hypothesis p > 1 fails");
  if (!(alpha > 0.0) || !(n - alpha * p > 0.0))
    throw RegimeError("hypothesis n - alpha*p > 0 fails");
  switch (mode) {
    case AdamsMode::riesz:
      if (!(s > p)) throw RegimeError("riesz mode needs s > p");
      break;
    case AdamsMode::maximal:
      if (!(s >= p)) throw RegimeError("maximal mode needs s >= p");
      break;
    case AdamsMode::lorentz:
      if (s != p) throw RegimeError("lorentz endpoint needs s == p");
      break;
  }
  const double beta = mode == AdamsMode::lorentz ? n - alpha * p : (s / p) * (n - alpha * p);

  const GridFunction mag = grid::abs(g);
  const GridFunction pot =
      mode == AdamsMode::maximal ? maximal(mag, alpha) : riesz_potential(mag, alpha);
  const double lhs = mu.integrate_abs_pow(pot, s);
  if (lhs == 0.0) return 0.0;
  const double gnorm =
      mode == AdamsMode::lorentz ? fractal::lorentz_norm_p1(g, p) : grid::lp_norm(g, p);
  const double denom = measure_norm_beta(mu, beta) * std::pow(gnorm, s);
  if (denom == 0.0)
    throw NumericalError("trace ratio denominator vanishes with nonzero numerator");
  return lhs / denom;
}

DiamBound diam_bound_check(const GridFunction& g, const DyadicCube& q, double alpha,
                           double p, double theta, DiamMode mode) {
  g.validate();
  const double n = static_cast<double>(g.dim);
  if (!(p > 1.0)) throw RegimeError("hypothesis p > 1 fails");
  const double r = q.side();
  if (!(r <= 1.0)) throw DomainError("cube side must satisfy r <= 1");
  switch (mode) {
    case DiamMode::riesz:
      if (!(alpha > 1.0)) throw RegimeError("riesz mode needs alpha > 1");
      if (!(alpha * p > n)) throw RegimeError("hypothesis alpha*p > n fails");
      break;
    case DiamMode::maximal:
      if (!(theta > 0.0)) throw RegimeError("maximal mode needs theta > 0");
      if (!(alpha + theta >= 1.0)) throw RegimeError("hypothesis alpha + theta >= 1 fails");
      if (!(alpha * p > n)) throw RegimeError("hypothesis alpha*p > n fails");
      break;
    case DiamMode::lorentz:
      if (!(theta > 0.0)) throw RegimeError("lorentz mode needs theta > 0");
      if (!(alpha + theta >= 1.0)) throw RegimeError("hypothesis alpha + theta >= 1 fails");
      if (!(alpha * p >= n)) throw RegimeError("hypothesis alpha*p >= n fails");
      break;
  }

  const GridFunction v = bessel_potential(g, alpha);
  DiamBound out;
  out.lhs = image_diameter_grid(v, q);

  const GridFunction mag = grid::abs(g);
  const GridFunction mg = maximal(mag, 0.0);
  const double first =
      (mode == DiamMode::lorentz ? fractal::lorentz_norm_p1(restrict_to_cube(mg, q), p)
                                 : lp_norm_on(mg, q, p)) *
      std::pow(r, alpha - n / p);

  double second;
  if (mode == DiamMode::riesz) {
    // I_{alpha-1}|g|; the order may hit the ambient dimension, where the
    // power kernel degenerates to a constant, so use the shared helper
    // rather than the strict public operator.
    const double order = alpha - 1.0;
    if (!(order > 0.0) || order > n)
      throw RegimeError("riesz mode needs 0 < alpha - 1 <= n on this grid");
    const GridFunction pot = power_potential(mag, order);
    second = std::pow(r, 1.0 - n) * integral_on(pot, q);
  } else {
    // Truncated fractional maximal function: the radius ladder stops at the
    // box diameter, which keeps orders at or above the dimension finite.
    const GridFunction pot = maximal_truncated(mag, alpha - 1.0 + theta);
    second = std::pow(r, 1.0 - n - theta) * integral_on(pot, q);
  }
  out.rhs = first + second;
  out.ratio = out.lhs > 0.0 && out.rhs > 0.0 ? out.lhs / out.rhs : 0.0;
  return out;
}

}  // namespace hlab::ops
