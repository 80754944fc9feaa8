#include "hlab/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "hlab/errors.hpp"

namespace hlab::dyadic {

namespace {

// Relative slack when comparing accumulated tau-weights against a cap, so
// that exact ties (which must not merge) survive rounding of the sums.
constexpr double kPackingTie = 1e-12;

std::string describe(const DyadicCube& c) {
  std::ostringstream os;
  os << "level=" << c.level << " coords=[";
  for (std::size_t i = 0; i < c.coords.size(); ++i) {
    if (i) os << ",";
    os << c.coords[i];
  }
  os << "]";
  return os.str();
}

double side_of_level(int level) { return std::ldexp(1.0, -level); }

double cube_weight(int level, double tau) { return std::pow(side_of_level(level), tau); }

}  // namespace

double DyadicCube::side() const { return side_of_level(level); }

double DyadicCube::min_corner(int axis) const {
  return static_cast<double>(coords[axis]) * side();
}

double DyadicCube::max_corner(int axis) const {
  return static_cast<double>(coords[axis] + 1) * side();
}

double DyadicCube::diameter() const { return side() * std::sqrt(static_cast<double>(dim())); }

DyadicCube DyadicCube::parent() const { return ancestor_at(level - 1); }

DyadicCube DyadicCube::ancestor_at(int ancestor_level) const {
  if (ancestor_level > level)
    throw DomainError("ancestor level must not exceed the cube's level");
  const int shift = level - ancestor_level;
  if (shift >= 63) throw DomainError("ancestor level too far above cube level");
  DyadicCube out;
  out.level = ancestor_level;
  out.coords.resize(coords.size());
  // Arithmetic right shift: floor division by 2^shift, exact for negatives.
  for (std::size_t i = 0; i < coords.size(); ++i) out.coords[i] = coords[i] >> shift;
  return out;
}

bool DyadicCube::contains(const DyadicCube& other) const {
  if (other.dim() != dim()) throw DomainError("cube dimensions differ");
  if (other.level < level) return false;
  const int shift = other.level - level;
  if (shift >= 63) return false;
  for (std::size_t i = 0; i < coords.size(); ++i)
    if ((other.coords[i] >> shift) != coords[i]) return false;
  return true;
}

bool DyadicCube::contains_point(std::span<const double> x) const {
  for (int axis = 0; axis < dim(); ++axis)
    if (x[axis] < min_corner(axis) || x[axis] > max_corner(axis)) return false;
  return true;
}

DyadicCube DyadicCube::containing_point(int level, std::span<const double> x) {
  DyadicCube out;
  out.level = level;
  out.coords.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out.coords[i] = static_cast<std::int64_t>(std::floor(std::ldexp(x[i], level)));
  return out;
}

void DyadicCube::validate() const {
  if (coords.empty()) throw DomainError("dyadic cube needs at least one coordinate");
}

CubeRelation relate(const DyadicCube& a, const DyadicCube& b) {
  if (a.dim() != b.dim()) throw DomainError("cube dimensions differ");
  if (a == b) return CubeRelation::equal;
  if (a.contains(b)) return CubeRelation::contains;
  if (b.contains(a)) return CubeRelation::contained;
  return CubeRelation::disjoint;
}

bool within_root(const DyadicCube& cube, int root_exponent) {
  if (cube.level < -root_exponent) return false;  // side above the root cube's
  const int e = root_exponent + cube.level;
  if (e >= 63) return false;
  const std::int64_t bound = std::int64_t{1} << e;
  for (std::int64_t c : cube.coords)
    if (c < -bound || c >= bound) return false;
  return true;
}

double CubeFamily::tau_weight() const {
  double acc = 0.0;
  for (const auto& c : cubes) acc += cube_weight(c.level, tau);
  return acc;
}

void CubeFamily::validate(int root_exponent) const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("tau must be positive and finite");
  if (cubes.empty()) return;
  const int d = cubes.front().dim();
  if (d != 1 && d != 2) throw DomainError("cube family dimension must be 1 or 2");
  for (const auto& c : cubes) {
    c.validate();
    if (c.dim() != d) throw DomainError("cube family mixes dimensions");
    if (c.level > 58) throw DomainError("cube level too deep");
    if (!within_root(c, root_exponent))
      throw DomainError("cube " + describe(c) + " escapes the root cube [-2^" +
                        std::to_string(root_exponent) + ", 2^" +
                        std::to_string(root_exponent) + "]^n");
  }
}

std::optional<PackingViolation> packing_violation(const CubeFamily& family,
                                                  int root_exponent) {
  family.validate(root_exponent);
  if (family.cubes.empty()) return std::nullopt;

  // Accumulate the member weight inside every ancestor-or-self of a member.
  // Duplicate members coalesce by weight. Nested or duplicated members always
  // overshoot the cap at the outer cube, so this check also certifies
  // pairwise nonoverlap.
  std::map<DyadicCube, double> inside;
  for (const auto& c : family.cubes) {
    const double w = cube_weight(c.level, family.tau);
    DyadicCube walk = c;
    while (true) {
      inside[walk] += w;
      if (walk.level <= -root_exponent) break;
      walk = walk.parent();
    }
  }
  for (const auto& [cube, weight] : inside) {
    const double cap = cube_weight(cube.level, family.tau);
    if (weight > cap * (1.0 + kPackingTie))
      return PackingViolation{cube, weight, cap};
  }
  return std::nullopt;
}

RegularFamily RegularFamily::validated(CubeFamily family, int root_exponent) {
  if (auto bad = packing_violation(family, root_exponent)) {
    std::ostringstream os;
    os << "family is not regular: packing inequality fails at cube "
       << describe(bad->witness) << " (weight inside " << bad->weight_inside
       << " > " << bad->cap << ")";
    throw PreconditionError(os.str());
  }
  return RegularFamily(std::move(family), root_exponent);
}

RegularFamily regularize(const CubeFamily& family, int root_exponent) {
  family.validate(root_exponent);
  CubeFamily out;
  out.tau = family.tau;
  if (family.cubes.empty()) return RegularFamily(std::move(out), root_exponent);

  // Coalesce duplicates; the weight carries multiplicity.
  std::map<DyadicCube, double> current;
  int max_level = family.cubes.front().level;
  for (const auto& c : family.cubes) {
    current[c] += cube_weight(c.level, family.tau);
    max_level = std::max(max_level, c.level);
  }

  // One sweep from the deepest candidate level up to the root suffices:
  // merging into a cube at level L only removes weight from deeper cubes,
  // so caps certified at deeper levels stay certified.
  for (int L = max_level; L >= -root_exponent; --L) {
    std::map<DyadicCube, std::pair<double, std::vector<DyadicCube>>> groups;
    for (const auto& [cube, w] : current) {
      if (cube.level < L) continue;
      DyadicCube anc = cube.ancestor_at(L);
      auto& g = groups[anc];
      g.first += w;
      g.second.push_back(cube);
    }
    const double cap = cube_weight(L, family.tau);
    for (auto& [anc, g] : groups) {
      if (g.first > cap * (1.0 + kPackingTie)) {
        for (const auto& m : g.second) current.erase(m);
        current[anc] = cap;
      }
    }
  }

  out.cubes.reserve(current.size());
  for (const auto& [cube, w] : current) out.cubes.push_back(cube);
  return RegularFamily(std::move(out), root_exponent);
}

FrostmanMeasure::FrostmanMeasure(RegularFamily family) : family_(std::move(family)) {
  if (!family_.cubes().empty() &&
      family_.tau() > static_cast<double>(family_.family().dim()))
    throw DomainError("Frostman measure requires tau <= ambient dimension");
}

FrostmanMeasure frostman_measure(const RegularFamily& family) {
  return FrostmanMeasure(family);
}

FrostmanMeasure frostman_measure(const CubeFamily& family, double tau, int root_exponent) {
  CubeFamily f = family;
  f.tau = tau;
  return FrostmanMeasure(RegularFamily::validated(std::move(f), root_exponent));
}

double FrostmanMeasure::mass(const DyadicCube& q) const {
  const double tau = family_.tau();
  const double n = static_cast<double>(dim());
  double acc = 0.0;
  for (const auto& member : family_.cubes()) {
    switch (relate(member, q)) {
      case CubeRelation::equal:
      case CubeRelation::contained:  // member inside q: full mass
        acc += cube_weight(member.level, tau);
        break;
      case CubeRelation::contains:  // q inside member: density * vol(q)
        acc += std::pow(q.side(), n) * std::pow(member.side(), tau - n);
        break;
      case CubeRelation::disjoint:
        break;
    }
  }
  return acc;
}

double FrostmanMeasure::total_mass() const { return family_.family().tau_weight(); }

CellRange cells_in_cube(const grid::GridFunction& f, const DyadicCube& q) {
  if (q.dim() != f.dim) throw DomainError("cube and grid dimensions differ");
  const double h = f.h();
  CellRange r;
  const double m_real = q.side() / h;
  const auto m = static_cast<std::int64_t>(std::llround(m_real));
  if (m < 1 || std::fabs(m_real - static_cast<double>(m)) > 1e-9)
    throw DomainError("cube " + describe(q) + " is not aligned with the grid (side/h = " +
                      std::to_string(m_real) + ")");
  for (int axis = 0; axis < f.dim; ++axis) {
    const double lo_real = (q.min_corner(axis) - f.corner[axis]) / h;
    const auto lo = static_cast<std::int64_t>(std::llround(lo_real));
    if (std::fabs(lo_real - static_cast<double>(lo)) > 1e-9)
      throw DomainError("cube " + describe(q) + " is not aligned with the grid");
    if (lo < 0 || lo + m > f.cells)
      throw DomainError("cube " + describe(q) + " escapes the grid box");
    r.lo[axis] = static_cast<int>(lo);
    r.hi[axis] = static_cast<int>(lo + m);
  }
  return r;
}

namespace {

template <typename Fn>
double cell_sum(const grid::GridFunction& f, const CellRange& r, Fn&& fn) {
  double acc = 0.0;
  if (f.dim == 1) {
    for (int ix = r.lo[0]; ix < r.hi[0]; ++ix) acc += fn(f.at(ix));
  } else {
    for (int iy = r.lo[1]; iy < r.hi[1]; ++iy)
      for (int ix = r.lo[0]; ix < r.hi[0]; ++ix) acc += fn(f.at(ix, iy));
  }
  return acc;
}

}  // namespace

double FrostmanMeasure::integrate(const grid::GridFunction& f) const {
  f.validate();
  const double cellvol = std::pow(f.h(), f.dim);
  const double n = static_cast<double>(dim());
  double acc = 0.0;
  for (const auto& member : family_.cubes()) {
    const auto r = cells_in_cube(f, member);
    const double density = std::pow(member.side(), family_.tau() - n);
    acc += density * cellvol * cell_sum(f, r, [](double v) { return v; });
  }
  return acc;
}

double FrostmanMeasure::integrate_abs_pow(const grid::GridFunction& f,
                                          double exponent) const {
  f.validate();
  if (!(exponent > 0.0)) throw DomainError("exponent must be positive");
  const double cellvol = std::pow(f.h(), f.dim);
  const double n = static_cast<double>(dim());
  double acc = 0.0;
  for (const auto& member : family_.cubes()) {
    const auto r = cells_in_cube(f, member);
    const double density = std::pow(member.side(), family_.tau() - n);
    acc += density * cellvol *
           cell_sum(f, r, [&](double v) { return std::pow(std::fabs(v), exponent); });
  }
  return acc;
}

double measure_norm_beta(const FrostmanMeasure& mu, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta must be positive");
  const auto& cubes = mu.family().cubes();
  if (cubes.empty()) return 0.0;
  const double n = static_cast<double>(mu.dim());
  if (beta > n && mu.total_mass() > 0.0)
    throw OverflowError("measure norm is infinite: beta exceeds the ambient dimension");

  // Candidates: members and their ancestors one level above the root. For
  // beta <= n the ratio inside a member peaks at the member itself, and any
  // other dyadic cube shares its mass with the minimal member-ancestor it
  // contains, which has a smaller side.
  const double tau = mu.tau();
  std::map<DyadicCube, double> inside;
  for (const auto& c : cubes) {
    const double w = cube_weight(c.level, tau);
    DyadicCube walk = c;
    while (true) {
      inside[walk] += w;
      if (walk.level <= -(mu.family().root_exponent() + 1)) break;
      walk = walk.parent();
    }
  }
  double sup = 0.0;
  for (const auto& [cube, m] : inside)
    sup = std::max(sup, m * std::pow(cube.side(), -beta));
  return sup;
}

double measure_norm_beta(const DiscreteMeasure& mu, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta must be positive");
  if (mu.points.size() != mu.weights.size())
    throw DomainError("discrete measure: points and weights differ in length");
  double total = 0.0;
  for (double w : mu.weights) {
    if (w < 0.0) throw DomainError("discrete measure weights must be nonnegative");
    total += w;
  }
  if (total > 0.0)
    throw OverflowError(
        "measure norm is infinite: a point mass defeats every side^-beta scaling");
  return 0.0;
}

void to_json(nlohmann::json& j, const DyadicCube& cube) {
  j = nlohmann::json{{"level", cube.level}, {"coords", cube.coords}};
}

void from_json(const nlohmann::json& j, DyadicCube& cube) {
  j.at("level").get_to(cube.level);
  j.at("coords").get_to(cube.coords);
  cube.validate();
}

void to_json(nlohmann::json& j, const CubeFamily& family) {
  j = nlohmann::json{{"tau", family.tau}, {"cubes", family.cubes}};
}

void from_json(const nlohmann::json& j, CubeFamily& family) {
  j.at("tau").get_to(family.tau);
  j.at("cubes").get_to(family.cubes);
}

}  // namespace hlab::dyadic
