#pragma once
#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "hlab/dyadic.hpp"
#include "hlab/grid.hpp"

namespace hlab::fractal {

// Finite sample of a set, tagged with how it was produced.
struct PointSet {
  int dim = 1;
  std::vector<std::array<double, 2>> points;  // unused axis stays 0
  std::string generator = "unspecified";
  std::uint64_t seed = 0;

  void validate(int root_exponent = dyadic::kDefaultRootExponent) const;
};

// Distinct level-`level` dyadic cubes meeting the sample, sorted.
std::vector<dyadic::DyadicCube> occupied_cubes(const PointSet& set, int level);

// sum of side^s over the occupied cubes at the given level.
double dyadic_content(const PointSet& set, double s, int level);

struct DimensionEstimate {
  double value = 0.0;
  std::vector<int> scales_used;
  std::vector<std::int64_t> counts;
  double fit_residual = 0.0;              // rms residual of the log2 fit
  bool saturated_scales_excluded = false;
};

// Least-squares slope of log2(occupied count) against the level over
// [level_min, level_max]. Scales whose count reaches the sample size
// (within 2%) are excluded as saturated.
DimensionEstimate box_dimension(const PointSet& set, int level_min, int level_max);

enum class CantorMode { endpoints, uniform_sample };

// Self-similar Cantor set on [0,1] with contraction ratio < 1/2.
// endpoints: the 2^(depth+1) construction endpoints; uniform_sample: the same
// number of points drawn from the natural measure (seeded).
PointSet cantor_set(double ratio, int depth, CantorMode mode, std::uint64_t seed = 0);

// Lorentz L_{p,1} norm, integral of meas{|f| > t}^{1/p} dt, computed exactly
// from the sorted histogram of |f|.
double lorentz_norm_p1(const grid::GridFunction& f, double p);

void to_json(nlohmann::json& j, const DimensionEstimate& est);

// CSV with a `# dim=<n> generator=<name> seed=<s>` header, one point per row.
void write_csv(std::ostream& out, const PointSet& set);
PointSet read_csv(std::istream& in);

}  // namespace hlab::fractal
