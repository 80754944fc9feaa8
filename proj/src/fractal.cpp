#include "hlab/fractal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "hlab/errors.hpp"
#include "hlab/rng.hpp"

namespace hlab::fractal {

void PointSet::validate(int root_exponent) const {
  if (dim != 1 && dim != 2) throw DomainError("point set dimension must be 1 or 2");
  const double bound = std::ldexp(1.0, root_exponent);
  for (const auto& pt : points)
    for (int axis = 0; axis < dim; ++axis) {
      if (!std::isfinite(pt[axis])) throw DomainError("point set contains a non-finite value");
      if (pt[axis] < -bound || pt[axis] > bound)
        throw DomainError("point escapes the root cube [-2^" +
                          std::to_string(root_exponent) + ", 2^" +
                          std::to_string(root_exponent) + "]^n");
    }
}

std::vector<dyadic::DyadicCube> occupied_cubes(const PointSet& set, int level) {
  set.validate();
  std::vector<dyadic::DyadicCube> cubes;
  cubes.reserve(set.points.size());
  for (const auto& pt : set.points)
    cubes.push_back(dyadic::DyadicCube::containing_point(
        level, std::span<const double>(pt.data(), static_cast<std::size_t>(set.dim))));
  std::sort(cubes.begin(), cubes.end());
  cubes.erase(std::unique(cubes.begin(), cubes.end()), cubes.end());
  return cubes;
}

double dyadic_content(const PointSet& set, double s, int level) {
  if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("content exponent must be positive");
  if (set.points.empty()) return 0.0;
  // Per-cube accumulation (not count * weight): the covering set-function
  // estimator reduces to this sum term by term for the identity map, and the
  // two must agree bit for bit.
  double sum = 0.0;
  for (const auto& cube : occupied_cubes(set, level)) sum += std::pow(cube.side(), s);
  return sum;
}

DimensionEstimate box_dimension(const PointSet& set, int level_min, int level_max) {
  set.validate();
  if (level_min < 0 || level_max < level_min)
    throw DomainError("box dimension needs 0 <= level_min <= level_max");
  if (level_max - level_min + 1 < 3)
    throw DomainError("box dimension needs at least 3 scales");
  if (set.points.empty()) throw DomainError("box dimension of an empty set");

  DimensionEstimate est;
  const auto npts = static_cast<double>(set.points.size());
  for (int level = level_min; level <= level_max; ++level) {
    const auto count = static_cast<std::int64_t>(occupied_cubes(set, level).size());
    // A count at the sample size means the cover resolves individual sample
    // points, not the underlying set; drop the scale. A single point is a
    // legitimate count, not saturation.
    if (count > 1 && static_cast<double>(count) >= 0.98 * npts) {
      est.saturated_scales_excluded = true;
      continue;
    }
    est.scales_used.push_back(level);
    est.counts.push_back(count);
  }
  if (est.scales_used.size() < 3)
    throw NumericalError("box dimension fit has fewer than 3 usable scales");

  // Least squares of y = log2(count) on x = level.
  const std::size_t k = est.scales_used.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double x = est.scales_used[i];
    const double y = std::log2(static_cast<double>(est.counts[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = k * sxx - sx * sx;
  const double slope = (k * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / k;
  double ss = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double x = est.scales_used[i];
    const double y = std::log2(static_cast<double>(est.counts[i]));
    const double r = y - (slope * x + intercept);
    ss += r * r;
  }
  est.value = slope;
  est.fit_residual = std::sqrt(ss / k);
  return est;
}

PointSet cantor_set(double ratio, int depth, CantorMode mode, std::uint64_t seed) {
  if (!(ratio > 0.0) || !(ratio < 0.5))
    throw DomainError("cantor ratio must lie in (0, 1/2)");
  if (depth < 0 || depth > 20) throw DomainError("cantor depth must lie in [0, 20]");

  PointSet set;
  set.dim = 1;
  set.seed = seed;
  char tag[96];
  std::snprintf(tag, sizeof tag, "cantor(ratio=%.17g,depth=%d,mode=%s)", ratio, depth,
                mode == CantorMode::endpoints ? "endpoints" : "uniform_sample");
  set.generator = tag;

  // Interval lefts at the requested depth; length is ratio^depth for all.
  std::vector<double> lefts{0.0};
  double len = 1.0;
  for (int d = 0; d < depth; ++d) {
    std::vector<double> next;
    next.reserve(lefts.size() * 2);
    const double shrunk = len * ratio;
    for (double a : lefts) {
      next.push_back(a);
      next.push_back(a + len - shrunk);
    }
    lefts = std::move(next);
    len = shrunk;
  }

  if (mode == CantorMode::endpoints) {
    set.points.reserve(lefts.size() * 2);
    for (double a : lefts) {
      set.points.push_back({a, 0.0});
      set.points.push_back({a + len, 0.0});
    }
  } else {
    // Natural-measure samples: a uniform branch at every construction level,
    // then a uniform position inside the landed interval. Same cardinality
    // as the endpoint mode.
    Rng rng = seeded_rng(seed);
    const std::size_t count = lefts.size() * 2;
    set.points.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      double a = 0.0, l = 1.0;
      for (int d = 0; d < depth; ++d) {
        const bool right = (rng() & 1u) != 0;
        const double shrunk = l * ratio;
        if (right) a += l - shrunk;
        l = shrunk;
      }
      set.points.push_back({a + uniform01(rng) * l, 0.0});
    }
  }
  std::sort(set.points.begin(), set.points.end());
  return set;
}

double lorentz_norm_p1(const grid::GridFunction& f, double p) {
  f.validate();
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("p must satisfy p > 1");
  const double cellvol = std::pow(f.h(), f.dim);
  std::vector<double> mags;
  mags.reserve(f.values.size());
  for (double v : f.values) mags.push_back(std::fabs(v));
  std::sort(mags.begin(), mags.end(), std::greater<>());
  // meas{|f| > t} is a right-continuous step function: for
  // t in (u_{k+1}, u_k] it equals k * cellvol. Integrate the layer cake
  // exactly over those steps.
  double acc = 0.0;
  for (std::size_t k = 0; k < mags.size(); ++k) {
    const double lo = (k + 1 < mags.size()) ? mags[k + 1] : 0.0;
    const double step = mags[k] - lo;
    if (step > 0.0)
      acc += step * std::pow(static_cast<double>(k + 1) * cellvol, 1.0 / p);
  }
  return acc;
}

void to_json(nlohmann::json& j, const DimensionEstimate& est) {
  j = nlohmann::json{{"value", est.value},
                     {"scales_used", est.scales_used},
                     {"counts", est.counts},
                     {"fit_residual", est.fit_residual},
                     {"saturated_scales_excluded", est.saturated_scales_excluded}};
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_csv(std::ostream& out, const PointSet& set) {
  out << "# dim=" << set.dim << " generator=" << set.generator << " seed=" << set.seed
      << "\n";
  for (const auto& pt : set.points) {
    out << fmt_double(pt[0]);
    if (set.dim == 2) out << "," << fmt_double(pt[1]);
    out << "\n";
  }
}

PointSet read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.empty() || line[0] != '#')
    throw DomainError("point csv: missing header line");
  PointSet set;
  bool have_dim = false;
  std::istringstream hs(line.substr(1));
  std::string tok;
  while (hs >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    if (key == "dim") {
      set.dim = std::stoi(val);
      have_dim = true;
    } else if (key == "generator") {
      set.generator = val;
    } else if (key == "seed") {
      set.seed = std::stoull(val);
    }
  }
  if (!have_dim) throw DomainError("point csv: header must carry dim=");
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::array<double, 2> pt{0.0, 0.0};
    const auto comma = line.find(',');
    pt[0] = std::stod(line.substr(0, comma));
    if (set.dim == 2) {
      if (comma == std::string::npos) throw DomainError("point csv: row misses a coordinate");
      pt[1] = std::stod(line.substr(comma + 1));
    }
    set.points.push_back(pt);
  }
  set.validate();
  return set;
}

}  // namespace hlab::fractal
