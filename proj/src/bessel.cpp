#include "hlab/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

#include "json.hpp"

#include "hlab/errors.hpp"

namespace hlab::ops {

namespace {

constexpr double kPi = 3.14159265358979323846;

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kGl8X[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                             -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                             0.7966664774136267,  0.9602898564975363};
constexpr double kGl8W[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                             0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                             0.2223810344533745, 0.1012285362903763};

// 32-point Gauss-Legendre on [0, 1] (nodes x, weights w), used for the polar
// integration of the singular cell in 2-d.
struct Gl32 {
  double x[32];
  double w[32];
  Gl32() {
    // Compute nodes by Newton iteration on the Legendre polynomial; done once.
    for (int i = 0; i < 16; ++i) {
      double t = std::cos(kPi * (i + 0.75) / (32 + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= 32; ++k) {
          const double pk = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = pk;
        }
        const double dp = 32.0 * (t * p1 - p0) / (t * t - 1.0);
        const double dt = p1 / dp;
        t -= dt;
        if (std::fabs(dt) < 1e-15) break;
      }
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= 32; ++k) {
        const double pk = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      const double dp = 32.0 * (t * p1 - p0) / (t * t - 1.0);
      const double wi = 2.0 / ((1.0 - t * t) * dp * dp);
      // map from [-1,1] to [0,1]
      x[i] = 0.5 * (1.0 - t);
      w[i] = 0.5 * wi;
      x[31 - i] = 0.5 * (1.0 + t);
      w[31 - i] = 0.5 * wi;
    }
  }
};

const Gl32& gl32() {
  static const Gl32 table;
  return table;
}

// Subordination integrand on the log scale t = e^u:
//   exp(-pi r^2 e^-u - e^u / (4 pi)) * e^(u (alpha - n) / 2),
// doubly exponentially small at both ends, so the trapezoid rule converges
// spectrally.
double subordination_integral(double alpha, int n, double r, double tol) {
  const double c = 0.5 * (alpha - n);
  const double r2 = kPi * r * r;
  // Window where the exponential factors fall 10^-30 below their peak.
  double u_lo = std::log(r2 / 75.0);
  double u_hi = std::log(4.0 * kPi * 75.0);
  u_lo -= 5.0;
  u_hi += 5.0;
  // Account for polynomial growth of e^(c u) inside the window margins.
  if (c > 0) u_hi += std::log1p(c);
  if (c < 0) u_lo -= std::log1p(-c);

  const auto integrand = [&](double u) {
    return std::exp(-r2 * std::exp(-u) - std::exp(u) / (4.0 * kPi) + c * u);
  };

  int steps = 64;
  double prev = 0.0;
  for (int round = 0; round < 16; ++round) {
    const double du = (u_hi - u_lo) / steps;
    double acc = 0.5 * (integrand(u_lo) + integrand(u_hi));
    for (int i = 1; i < steps; ++i) acc += integrand(u_lo + i * du);
    acc *= du;
    if (round > 2 && std::fabs(acc - prev) <= tol * std::max(std::fabs(acc), 1e-300))
      return acc;
    prev = acc;
    steps *= 2;
  }
  throw NumericalError("Bessel kernel quadrature did not converge at radius " +
                       std::to_string(r));
}

double bessel_kernel_value(double alpha, int n, double r, double tol) {
  const double front = std::pow(4.0 * kPi, -0.5 * alpha) / std::tgamma(0.5 * alpha);
  return front * subordination_integral(alpha, n, r, tol);
}

double riesz_kernel_value(double beta, int n, double r) {
  return std::pow(r, beta - n);
}

double kernel_value(const KernelSpec& spec, double r) {
  if (spec.kind == KernelSpec::Kind::bessel)
    return bessel_kernel_value(spec.order, spec.dim, r, spec.quadrature_tolerance);
  return riesz_kernel_value(spec.order, spec.dim, r);
}

// int_a^b K(|y|) dy on a 1-d cell not containing the origin, 8-point GL.
double cell_integral_1d(const KernelSpec& spec, double a, double b) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < 8; ++i)
    acc += kGl8W[i] * kernel_value(spec, std::fabs(mid + half * kGl8X[i]));
  return acc * half;
}

// 2 int_0^(h/2) K(r) dr with dyadic panels shrinking into the integrable
// singularity at the origin.
double singular_cell_1d(const KernelSpec& spec, double h) {
  const double edge = 0.5 * h;
  double acc = 0.0;
  double hi = edge;
  for (int panel = 0; panel < 60; ++panel) {
    const double lo = hi * 0.5;
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double part = 0.0;
    for (int i = 0; i < 8; ++i)
      part += kGl8W[i] * kernel_value(spec, mid + half * kGl8X[i]);
    part *= half;
    acc += part;
    if (part < spec.quadrature_tolerance * std::max(acc, 1e-300) && panel > 6) break;
    hi = lo;
  }
  return 2.0 * acc;
}

// int over the square cell [-h/2,h/2]^2 of K(|y|): eight symmetric wedges,
// theta in [0, pi/4], radial part int_0^(R(theta)) K(r) r dr with dyadic
// panels toward the origin.
double singular_cell_2d(const KernelSpec& spec, double h) {
  const auto& gl = gl32();
  const double edge = 0.5 * h;
  double acc = 0.0;
  for (int i = 0; i < 32; ++i) {
    const double theta = gl.x[i] * (kPi / 4.0);
    const double rmax = edge / std::cos(theta);
    double radial = 0.0;
    double hi = rmax;
    for (int panel = 0; panel < 60; ++panel) {
      const double lo = hi * 0.5;
      const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      double part = 0.0;
      for (int k = 0; k < 8; ++k) {
        const double r = mid + half * kGl8X[k];
        part += kGl8W[k] * kernel_value(spec, r) * r;
      }
      part *= half;
      radial += part;
      if (part < spec.quadrature_tolerance * std::max(radial, 1e-300) && panel > 6) break;
      hi = lo;
    }
    acc += gl.w[i] * radial;
  }
  return 8.0 * acc * (kPi / 4.0);
}

// Closed-form 1-d power-kernel cell integrals: antiderivative of |t|^(b-1)
// is sign(t) |t|^b / b, valid across the origin.
double riesz_cell_1d_exact(double beta, double a, double b) {
  const auto prim = [beta](double t) {
    return (t >= 0 ? 1.0 : -1.0) * std::pow(std::fabs(t), beta) / beta;
  };
  return prim(b) - prim(a);
}

// Singular-cell polar rule in 2-d for |y|^(beta-2):
// 8/beta * int_0^(pi/4) ((h/2) sec(theta))^beta dtheta.
double riesz_singular_2d(double beta, double h) {
  const auto& gl = gl32();
  double acc = 0.0;
  for (int i = 0; i < 32; ++i) {
    const double theta = gl.x[i] * (kPi / 4.0);
    acc += gl.w[i] * std::pow(0.5 * h / std::cos(theta), beta);
  }
  return 8.0 / beta * acc * (kPi / 4.0);
}

std::vector<double> build_weights(const KernelSpec& spec, double h, int max_offset) {
  std::vector<double> w;
  if (spec.dim == 1) {
    w.resize(static_cast<std::size_t>(max_offset) + 1);
    if (spec.kind == KernelSpec::Kind::riesz) {
      for (int k = 0; k <= max_offset; ++k)
        w[k] = riesz_cell_1d_exact(spec.order, (k - 0.5) * h, (k + 0.5) * h);
    } else {
      w[0] = singular_cell_1d(spec, h);
      for (int k = 1; k <= max_offset; ++k)
        w[k] = cell_integral_1d(spec, (k - 0.5) * h, (k + 0.5) * h);
    }
  } else {
    const int stride = max_offset + 1;
    w.resize(static_cast<std::size_t>(stride) * stride);
    for (int di = 0; di <= max_offset; ++di)
      for (int dj = 0; dj <= max_offset; ++dj) {
        if (di == 0 && dj == 0) {
          w[0] = spec.kind == KernelSpec::Kind::riesz ? riesz_singular_2d(spec.order, h)
                                                      : singular_cell_2d(spec, h);
        } else {
          const double r = h * std::hypot(static_cast<double>(di), static_cast<double>(dj));
          w[static_cast<std::size_t>(di) * stride + dj] = kernel_value(spec, r) * h * h;
        }
      }
  }
  return w;
}

struct CacheKey {
  int kind;
  double order;
  int dim;
  double h;
  double tol;
  int max_offset;
  auto operator<=>(const CacheKey&) const = default;
};

std::string cache_file_name(const CacheKey& key) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "kernel_%s_n%d_a%.17g_h%.17g_t%.17g_m%d.json",
                key.kind == 0 ? "bessel" : "riesz", key.dim, key.order, key.h, key.tol,
                key.max_offset);
  return buf;
}

std::shared_ptr<const std::vector<double>> load_from_disk(const CacheKey& key) {
  const char* dir = std::getenv("HLAB_CACHE_DIR");
  if (!dir || !*dir) return nullptr;
  const auto path = std::filesystem::path(dir) / cache_file_name(key);
  std::ifstream in(path);
  if (!in) return nullptr;
  try {
    nlohmann::json j;
    in >> j;
    // Reject the table unless every key component matches exactly.
    if (j.at("kind").get<int>() != key.kind || j.at("dim").get<int>() != key.dim ||
        j.at("order").get<double>() != key.order || j.at("h").get<double>() != key.h ||
        j.at("tolerance").get<double>() != key.tol ||
        j.at("max_offset").get<int>() != key.max_offset)
      return nullptr;
    auto w = std::make_shared<std::vector<double>>();
    j.at("weights").get_to(*w);
    return w;
  } catch (const std::exception&) {
    return nullptr;
  }
}

void store_to_disk(const CacheKey& key, const std::vector<double>& w) {
  const char* dir = std::getenv("HLAB_CACHE_DIR");
  if (!dir || !*dir) return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) return;
  nlohmann::json j{{"kind", key.kind}, {"dim", key.dim},        {"order", key.order},
                   {"h", key.h},       {"tolerance", key.tol},  {"max_offset", key.max_offset},
                   {"weights", w}};
  const auto path = std::filesystem::path(dir) / cache_file_name(key);
  std::ofstream out(path);
  if (out) out << j;
}

std::mutex g_cache_mutex;
std::map<CacheKey, std::shared_ptr<const std::vector<double>>> g_cache;

}  // namespace

double bessel_kernel(const KernelSpec& spec, double radius) {
  if (spec.kind != KernelSpec::Kind::bessel)
    throw DomainError("bessel_kernel requires a bessel kernel spec");
  if (spec.dim != 1 && spec.dim != 2) throw DomainError("kernel dim must be 1 or 2");
  if (!(spec.order > 0.0)) throw DomainError("alpha must be positive");
  if (!(radius > 0.0)) throw DomainError("radius must be positive");
  if (!(spec.quadrature_tolerance > 0.0))
    throw DomainError("quadrature tolerance must be positive");
  return bessel_kernel_value(spec.order, spec.dim, radius, spec.quadrature_tolerance);
}

std::shared_ptr<const std::vector<double>> kernel_weight_table(const KernelSpec& spec,
                                                               double h, int max_offset) {
  if (spec.dim != 1 && spec.dim != 2) throw DomainError("kernel dim must be 1 or 2");
  if (!(spec.order > 0.0)) throw DomainError("kernel order must be positive");
  if (!(h > 0.0)) throw DomainError("grid step must be positive");
  if (max_offset < 0) throw DomainError("max_offset must be nonnegative");
  const CacheKey key{spec.kind == KernelSpec::Kind::bessel ? 0 : 1, spec.order, spec.dim,
                     h, spec.quadrature_tolerance, max_offset};
  {
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    if (auto it = g_cache.find(key); it != g_cache.end()) return it->second;
  }
  auto table = load_from_disk(key);
  if (!table) {
    table = std::make_shared<const std::vector<double>>(build_weights(spec, h, max_offset));
    store_to_disk(key, *table);
  }
  std::lock_guard<std::mutex> lock(g_cache_mutex);
  auto [it, inserted] = g_cache.emplace(key, table);
  return it->second;
}

grid::GridFunction bessel_potential(const grid::GridFunction& g, double alpha,
                                    double tolerance) {
  g.validate();
  if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
  if (!(tolerance > 0.0)) throw DomainError("tolerance must be positive");
  KernelSpec spec{KernelSpec::Kind::bessel, alpha, g.dim, tolerance};
  const auto w = kernel_weight_table(spec, g.h(), g.cells);
  grid::GridFunction out = g;
  const int n = g.cells;
  if (g.dim == 1) {
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += (*w)[static_cast<std::size_t>(std::abs(i - j))] * g.values[j];
      out.values[i] = acc;
    }
  } else {
    const int stride = n + 1;
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        double acc = 0.0;
        for (int jy = 0; jy < n; ++jy) {
          const std::size_t row = static_cast<std::size_t>(std::abs(iy - jy)) * stride;
          for (int jx = 0; jx < n; ++jx)
            acc += (*w)[row + std::abs(ix - jx)] * g.at(jx, jy);
        }
        out.at(ix, iy) = acc;
      }
  }
  return out;
}

}  // namespace hlab::ops
