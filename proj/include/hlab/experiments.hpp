#pragma once
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "hlab/dyadic.hpp"
#include "hlab/exponents.hpp"
#include "hlab/fractal.hpp"
#include "hlab/grid.hpp"
#include "hlab/operators.hpp"

namespace hlab::expt {

using exponents::DistortionParams;
using fractal::PointSet;
using grid::GridFunction;

nlohmann::json params_json(const DistortionParams& params);

// End-to-end dimension-distortion experiment over a Cantor reference set.
// Scenarios: cantor_identity (v = x), cantor_holder (v = sign(x)|x|^gamma),
// cantor_bessel (v = K_alpha * g for seeded random g). Fully deterministic
// given (scenario, params, seed, grid, trials).
struct ExperimentConfig {
  std::string scenario = "cantor_identity";
  DistortionParams params{1, 1.5, 2.0, {}, {}, false};
  std::uint64_t seed = 0;
  int grid_exponent = 12;  // synthesized maps are sampled on 2^k cells
  int trials = 1;
  double cantor_ratio = 1.0 / 3.0;
  int cantor_depth = 12;
  int level_min = 4;
  int level_max = 9;
  double holder_gamma = 0.5;

  void validate() const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& config);

// Regularized dyadic cover of E at one level together with the sampled image
// diameter of each member cube under the experiment map.
struct CoverImage {
  int level = 0;
  dyadic::RegularFamily cover;
  std::vector<double> image_diams;
};

// Image diameter of a cube from the 2^n corner samples plus the center; an
// under-estimate of the true diameter by at most the modulus of v at the
// sampling gap.
double image_diameter_sampled(const std::function<double(double)>& v,
                              const dyadic::DyadicCube& q);

std::vector<CoverImage> cover_images(const PointSet& set,
                                     const std::function<double(double)>& v, double tau,
                                     int level_min, int level_max);

struct LevelRow {
  int level = 0;
  std::size_t cover_size = 0;
  double tau_sum = 0.0;    // sum of side^tau over the regularized cover
  double sigma_sum = 0.0;  // sum of (image diameter)^sigma
  double codecay_bound = 0.0;
  bool codecay_ok = true;
};

// Per-level weight sums for a set/map pair: the co-decay bound at level l is
// 4 * sigma_sum(l0) * tau_sum(l) / tau_sum(l0) with l0 the first level; a
// degenerate map (all image sums zero) passes trivially.
std::vector<LevelRow> distortion_rows(std::span<const CoverImage> covers, double tau,
                                      double sigma);

struct DistortionReport {
  ExperimentConfig config;
  double tau = 0.0;    // box-dimension estimate of E, reused as the weight exponent
  double sigma = 0.0;  // sigma(tau) under config.params
  std::string sigma_regime;
  std::string map_description;
  fractal::DimensionEstimate dim_set;
  fractal::DimensionEstimate dim_image;
  std::vector<LevelRow> rows;
  bool codecay_ok = true;
  std::optional<double> holder_ceiling;  // dim(E)/gamma + 0.05 (holder scenario)
  double diameter_underestimate_bound = 0.0;  // grid modulus of a synthesized map
};

void to_json(nlohmann::json& j, const DistortionReport& report);

DistortionReport run_distortion_experiment(const ExperimentConfig& config);

// Minimum over levels of sum_j side(D_j)^mu * diam(v(D_j))^q on the raw
// occupied covers; an upper bound for the covering set function.
struct PhiEstimate {
  double value = 0.0;
  dyadic::CubeFamily cover;  // witnessing cover
  double mu_exponent = 0.0;
  double q_exponent = 1.0;
  int level = 0;
  std::vector<int> levels;
  std::vector<double> per_level;
};

void to_json(nlohmann::json& j, const PhiEstimate& estimate);

PhiEstimate phi_estimate(const PointSet& set, const GridFunction& v, double mu, double q,
                         std::span<const int> levels);
// Same with an analytic map.
PhiEstimate phi_estimate(const PointSet& set, const std::function<double(double)>& v,
                         double mu, double q, std::span<const int> levels);

// Slice check: on every cover level, the split sum
//   S = sum side^mu * (image diam)^q,  mu = tau (1 - q/sigma),
// obeys S <= (tau_sum)^(1-q/sigma) * (sigma_sum)^(q/sigma) -- finite-sum
// Hoelder, verified to rounding error. q = sigma degenerates to the sigma sum.
struct NstarRow {
  int level = 0;
  double tau_sum = 0.0;
  double sigma_sum = 0.0;
  double split_sum = 0.0;
  double bound = 0.0;
  bool ok = true;
};

struct NstarReport {
  ExperimentConfig config;
  double q = 0.0;
  double tau = 0.0;
  double sigma = 0.0;
  double mu = 0.0;
  std::vector<NstarRow> rows;
  bool all_ok = true;
};

void to_json(nlohmann::json& j, const NstarReport& report);

NstarReport run_nstar_slice_check(const ExperimentConfig& config, double q);

// Trace-inequality stability harness: per seeded trial, a random regular
// family in the unit box and a random nonnegative g; the empirical max of
// adams_ratio must be stable (< factor 2) under h -> h/2 refinement and
// under doubling the trial count.
struct AdamsCheckConfig {
  ops::AdamsMode mode = ops::AdamsMode::riesz;
  int trials = 100;
  std::uint64_t seed = 0;
  int dim = 1;
  double alpha = 0.4;
  double p = 1.5;
  std::optional<double> s;  // default: 4p/3 in riesz mode, p otherwise
  int cells = 64;
  int max_level = 6;
  int family_size = 24;

  double effective_s() const;
  void validate() const;
};

void to_json(nlohmann::json& j, const AdamsCheckConfig& config);

struct AdamsCheckReport {
  AdamsCheckConfig config;
  double beta = 0.0;
  double max_ratio = 0.0;
  double max_ratio_refined = 0.0;
  double max_ratio_doubled = 0.0;
  double refine_factor = 0.0;
  double doubling_factor = 0.0;
  bool stable = false;
  std::vector<double> ratios;  // base-resolution ratio per trial
};

void to_json(nlohmann::json& j, const AdamsCheckReport& report);

AdamsCheckReport run_adams_check(const AdamsCheckConfig& config);

// Diameter-bound stability harness over random (g, Q) pairs on [-2, 2].
struct DiamCheckConfig {
  ops::DiamMode mode = ops::DiamMode::riesz;
  int trials = 200;
  std::uint64_t seed = 0;
  double alpha = 2.0;
  double p = 3.0;
  double theta = 0.5;
  int cells = 256;
  int level_lo = 2;
  int level_hi = 6;

  void validate() const;
};

void to_json(nlohmann::json& j, const DiamCheckConfig& config);

struct DiamCheckReport {
  DiamCheckConfig config;
  double max_ratio = 0.0;
  double max_ratio_refined = 0.0;
  double refine_factor = 0.0;
  double zero_input_ratio = 0.0;  // ratio for g = 0, must be 0
  bool stable = false;
  std::vector<double> ratios;
};

void to_json(nlohmann::json& j, const DiamCheckReport& report);

DiamCheckReport run_diam_check(const DiamCheckConfig& config);

}  // namespace hlab::expt
