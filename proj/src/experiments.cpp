#include "hlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>

#include "hlab/bessel.hpp"
#include "hlab/errors.hpp"
#include "hlab/rng.hpp"
#include "hlab/synth.hpp"

namespace hlab::expt {

namespace {

// Static partition over independent trials; each body call owns its output
// slot, so the only shared state is the first-error capture.
void parallel_for(int count, const std::function<void(int)>& body) {
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  const int threads = std::clamp(std::min(hw, count), 1, 8);
  if (threads <= 1) {
    for (int t = 0; t < count; ++t) body(t);
    return;
  }
  std::mutex gate;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int k = 0; k < threads; ++k)
    pool.emplace_back([&, k] {
      for (int t = k; t < count; t += threads) {
        try {
          body(t);
        } catch (...) {
          std::lock_guard lock(gate);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct ScenarioMap {
  std::function<double(double)> eval;
  std::string description;
  double modulus_bound = 0.0;  // 0 for exact closures
};

ScenarioMap build_map(const ExperimentConfig& config) {
  if (config.scenario == "cantor_identity")
    return {[](double x) { return x; }, "identity", 0.0};
  if (config.scenario == "cantor_holder") {
    const double gamma = config.holder_gamma;
    return {[gamma](double x) { return std::copysign(std::pow(std::fabs(x), gamma), x); },
            "sign(x)|x|^" + std::to_string(gamma), 0.0};
  }
  if (config.scenario == "cantor_bessel") {
    Rng rng = seeded_rng(config.seed);
    const int cells = 1 << config.grid_exponent;
    grid::GridFunction g = synth::random_grid(rng, 1, {-2.0, 0.0}, 4.0, cells, -1.0, 1.0);
    grid::GridFunction v = ops::bessel_potential(g, config.params.alpha);
    // One-cell increment of the sampled potential; the corner+center image
    // diameter under-estimates the true one by at most this modulus summed
    // over the cells spanned by the widest sampling gap.
    double step = 0.0;
    for (int i = 0; i + 1 < cells; ++i)
      step = std::max(step, std::fabs(v.values[i + 1] - v.values[i]));
    const double gap = std::ldexp(1.0, -(config.level_min + 1));
    const double bound = step * std::ceil(gap / v.h());
    auto eval = [field = std::move(v)](double x) {
      const std::array<double, 1> xs{x};
      return field.sample_linear(xs);
    };
    return {std::move(eval), "bessel_potential(seeded g)", bound};
  }
  throw DomainError(
      "unknown scenario (expected cantor_identity, cantor_holder, or cantor_bessel)");
}

struct Prepared {
  PointSet set;
  ScenarioMap map;
  fractal::DimensionEstimate dim_set;
  double tau = 0.0;
  exponents::SigmaResult sig;
};

Prepared prepare(const ExperimentConfig& config) {
  config.validate();
  // The endpoint spacing must stay well below the finest cover level, so
  // that occupied cubes reproduce the exact generator cover.
  if (std::pow(config.cantor_ratio, config.cantor_depth) >
      std::ldexp(1.0, -(config.level_max + 2)))
    throw DomainError("generator resolution too coarse for the requested cover levels");

  Prepared prep;
  prep.set = fractal::cantor_set(config.cantor_ratio, config.cantor_depth,
                                 fractal::CantorMode::endpoints, config.seed);
  prep.map = build_map(config);
  prep.dim_set = fractal::box_dimension(prep.set, config.level_min, config.level_max);
  prep.tau = prep.dim_set.value;
  prep.sig = exponents::sigma(config.params, prep.tau);
  return prep;
}

PointSet image_points(const PointSet& set, const std::function<double(double)>& v,
                      const std::string& description) {
  PointSet image;
  image.dim = 1;
  image.seed = set.seed;
  image.generator = set.generator + " -> " + description;
  image.points.reserve(set.points.size());
  for (const auto& pt : set.points) image.points.push_back({v(pt[0]), 0.0});
  return image;
}

}  // namespace

nlohmann::json params_json(const DistortionParams& params) {
  nlohmann::json j{{"n", params.n}, {"alpha", params.alpha}, {"p", params.p},
                   {"lorentz_mode", params.lorentz_mode}};
  if (params.k) j["k"] = *params.k;
  if (params.m) j["m"] = *params.m;
  return j;
}

void ExperimentConfig::validate() const {
  params.validate();
  if (scenario.empty()) throw DomainError("scenario must be named");
  if (grid_exponent < 4 || grid_exponent > 22)
    throw DomainError("grid_exponent must lie in [4, 22]");
  if (trials < 1) throw DomainError("trials must be positive");
  if (!(cantor_ratio > 0.0) || !(cantor_ratio < 0.5))
    throw DomainError("cantor_ratio must lie in (0, 1/2)");
  if (cantor_depth < 1 || cantor_depth > 20)
    throw DomainError("cantor_depth must lie in [1, 20]");
  if (level_min < 0 || level_max <= level_min)
    throw DomainError("need 0 <= level_min < level_max");
  if (!(holder_gamma > 0.0) || holder_gamma > 1.0)
    throw DomainError("holder_gamma must lie in (0, 1]");
}

void to_json(nlohmann::json& j, const ExperimentConfig& config) {
  j = nlohmann::json{{"scenario", config.scenario},
                     {"params", params_json(config.params)},
                     {"seed", config.seed},
                     {"grid_exponent", config.grid_exponent},
                     {"trials", config.trials},
                     {"cantor_ratio", config.cantor_ratio},
                     {"cantor_depth", config.cantor_depth},
                     {"level_min", config.level_min},
                     {"level_max", config.level_max},
                     {"holder_gamma", config.holder_gamma}};
}

double image_diameter_sampled(const std::function<double(double)>& v,
                              const dyadic::DyadicCube& q) {
  if (q.dim() != 1) throw DomainError("experiment maps are one-dimensional");
  const double a = q.min_corner(0), b = q.max_corner(0);
  const double va = v(a), vb = v(b), vc = v(0.5 * (a + b));
  const double hi = std::max(va, std::max(vb, vc));
  const double lo = std::min(va, std::min(vb, vc));
  return hi - lo;
}

std::vector<CoverImage> cover_images(const PointSet& set,
                                     const std::function<double(double)>& v, double tau,
                                     int level_min, int level_max) {
  std::vector<CoverImage> out;
  out.reserve(static_cast<std::size_t>(level_max - level_min + 1));
  for (int level = level_min; level <= level_max; ++level) {
    dyadic::CubeFamily family;
    family.cubes = fractal::occupied_cubes(set, level);
    family.tau = tau;
    dyadic::RegularFamily cover = dyadic::regularize(family);
    std::vector<double> diams;
    diams.reserve(cover.cubes().size());
    for (const auto& q : cover.cubes()) diams.push_back(image_diameter_sampled(v, q));
    out.push_back(CoverImage{level, std::move(cover), std::move(diams)});
  }
  return out;
}

std::vector<LevelRow> distortion_rows(std::span<const CoverImage> covers, double tau,
                                      double sigma) {
  std::vector<LevelRow> rows;
  rows.reserve(covers.size());
  double tau0 = 0.0, sigma0 = 0.0;
  for (std::size_t i = 0; i < covers.size(); ++i) {
    LevelRow row;
    row.level = covers[i].level;
    row.cover_size = covers[i].cover.cubes().size();
    double tsum = 0.0;
    for (const auto& q : covers[i].cover.cubes()) tsum += std::pow(q.side(), tau);
    double ssum = 0.0;
    for (double d : covers[i].image_diams) ssum += std::pow(d, sigma);
    row.tau_sum = tsum;
    row.sigma_sum = ssum;
    if (i == 0) {
      tau0 = tsum;
      sigma0 = ssum;
    }
    if (sigma0 <= 0.0) {
      row.codecay_bound = 0.0;
      row.codecay_ok = ssum == 0.0;
    } else {
      row.codecay_bound = 4.0 * sigma0 * (tsum / tau0);
      row.codecay_ok = ssum <= row.codecay_bound * (1.0 + 1e-12);
    }
    rows.push_back(row);
  }
  return rows;
}

void to_json(nlohmann::json& j, const DistortionReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.rows)
    rows.push_back({{"level", row.level},
                    {"cover_size", row.cover_size},
                    {"tau_sum", row.tau_sum},
                    {"sigma_sum", row.sigma_sum},
                    {"codecay_bound", row.codecay_bound},
                    {"codecay_ok", row.codecay_ok}});
  nlohmann::json dim_set, dim_image;
  fractal::to_json(dim_set, report.dim_set);
  fractal::to_json(dim_image, report.dim_image);
  j = nlohmann::json{{"config", report.config},
                     {"tau", report.tau},
                     {"sigma", report.sigma},
                     {"sigma_regime", report.sigma_regime},
                     {"map", report.map_description},
                     {"dim_set", dim_set},
                     {"dim_image", dim_image},
                     {"levels", rows},
                     {"codecay_ok", report.codecay_ok},
                     {"diameter_underestimate_bound", report.diameter_underestimate_bound}};
  if (report.holder_ceiling) j["holder_ceiling"] = *report.holder_ceiling;
}

DistortionReport run_distortion_experiment(const ExperimentConfig& config) {
  Prepared prep = prepare(config);

  DistortionReport report;
  report.config = config;
  report.tau = prep.tau;
  report.sigma = prep.sig.value;
  report.sigma_regime = exponents::to_string(prep.sig.regime);
  report.map_description = prep.map.description;
  report.dim_set = prep.dim_set;
  report.diameter_underestimate_bound = prep.map.modulus_bound;

  const std::vector<CoverImage> covers =
      cover_images(prep.set, prep.map.eval, prep.tau, config.level_min, config.level_max);
  report.rows = distortion_rows(covers, prep.tau, prep.sig.value);
  report.codecay_ok = std::all_of(report.rows.begin(), report.rows.end(),
                                  [](const LevelRow& r) { return r.codecay_ok; });

  const PointSet image = image_points(prep.set, prep.map.eval, prep.map.description);
  report.dim_image = fractal::box_dimension(image, config.level_min, config.level_max);
  if (config.scenario == "cantor_holder")
    report.holder_ceiling = prep.dim_set.value / config.holder_gamma + 0.05;
  return report;
}

void to_json(nlohmann::json& j, const PhiEstimate& estimate) {
  nlohmann::json cover;
  dyadic::to_json(cover, estimate.cover);
  j = nlohmann::json{{"value", estimate.value},
                     {"mu_exponent", estimate.mu_exponent},
                     {"q_exponent", estimate.q_exponent},
                     {"level", estimate.level},
                     {"levels", estimate.levels},
                     {"per_level", estimate.per_level},
                     {"cover", std::move(cover)}};
}

PhiEstimate phi_estimate(const PointSet& set, const std::function<double(double)>& v,
                         double mu, double q, std::span<const int> levels) {
  if (!(mu >= 0.0)) throw DomainError("mu must be nonnegative");
  if (!(q > 0.0)) throw DomainError("q must be positive");
  if (levels.empty()) throw DomainError("need at least one cover level");
  set.validate();

  PhiEstimate est;
  est.mu_exponent = mu;
  est.q_exponent = q;
  est.levels.assign(levels.begin(), levels.end());
  bool first = true;
  for (int level : levels) {
    const std::vector<dyadic::DyadicCube> cubes = fractal::occupied_cubes(set, level);
    double sum = 0.0;
    for (const auto& cube : cubes)
      sum += std::pow(cube.side(), mu) * std::pow(image_diameter_sampled(v, cube), q);
    est.per_level.push_back(sum);
    if (first || sum < est.value) {
      est.value = sum;
      est.level = level;
      est.cover.cubes = cubes;
      est.cover.tau = 1.0;
      first = false;
    }
  }
  return est;
}

PhiEstimate phi_estimate(const PointSet& set, const GridFunction& v, double mu, double q,
                         std::span<const int> levels) {
  v.validate();
  if (v.dim != 1 || set.dim != 1)
    throw DomainError("the covering estimator works on one-dimensional data");
  for (const auto& pt : set.points)
    if (pt[0] < v.corner[0] || pt[0] > v.corner[0] + v.side)
      throw DomainError("point set escapes the map's box");
  return phi_estimate(
      set,
      [&v](double x) {
        const std::array<double, 1> xs{x};
        return v.sample_linear(xs);
      },
      mu, q, levels);
}

void to_json(nlohmann::json& j, const NstarReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.rows)
    rows.push_back({{"level", row.level},
                    {"tau_sum", row.tau_sum},
                    {"sigma_sum", row.sigma_sum},
                    {"split_sum", row.split_sum},
                    {"bound", row.bound},
                    {"ok", row.ok}});
  j = nlohmann::json{{"config", report.config}, {"q", report.q},
                     {"tau", report.tau},       {"sigma", report.sigma},
                     {"mu", report.mu},         {"levels", rows},
                     {"all_ok", report.all_ok}};
}

NstarReport run_nstar_slice_check(const ExperimentConfig& config, double q) {
  Prepared prep = prepare(config);
  const double sigma = prep.sig.value;
  if (!(q > 0.0) || q > sigma * (1.0 + 1e-12))
    throw DomainError("slice exponent q must lie in (0, sigma]");
  const double theta = std::min(q / sigma, 1.0);
  const double mu = prep.tau * (1.0 - theta);

  NstarReport report;
  report.config = config;
  report.q = q;
  report.tau = prep.tau;
  report.sigma = sigma;
  report.mu = mu;

  const std::vector<CoverImage> covers =
      cover_images(prep.set, prep.map.eval, prep.tau, config.level_min, config.level_max);
  report.all_ok = true;
  for (const auto& cover : covers) {
    NstarRow row;
    row.level = cover.level;
    row.tau_sum = cover.cover.family().tau_weight();
    double ssum = 0.0, split = 0.0;
    const auto& cubes = cover.cover.cubes();
    for (std::size_t i = 0; i < cubes.size(); ++i) {
      ssum += std::pow(cover.image_diams[i], sigma);
      split += std::pow(cubes[i].side(), mu) * std::pow(cover.image_diams[i], q);
    }
    row.sigma_sum = ssum;
    row.split_sum = split;
    row.bound = std::pow(row.tau_sum, 1.0 - theta) * std::pow(ssum, theta);
    row.ok = split <= row.bound * (1.0 + 1e-12);
    report.all_ok = report.all_ok && row.ok;
    report.rows.push_back(row);
  }
  return report;
}

double AdamsCheckConfig::effective_s() const {
  if (s) return *s;
  return mode == ops::AdamsMode::riesz ? 4.0 * p / 3.0 : p;
}

void AdamsCheckConfig::validate() const {
  if (trials < 1) throw DomainError("trials must be positive");
  if (dim != 1 && dim != 2) throw DomainError("dim must be 1 or 2");
  if (max_level < 1 || max_level > 12) throw DomainError("max_level must lie in [1, 12]");
  if (cells < (1 << max_level) || cells > 8192)
    throw DomainError("cells must cover the family depth (cells >= 2^max_level)");
  if (family_size < 1 || family_size > 10000)
    throw DomainError("family_size must lie in [1, 10000]");
  if (!(p > 1.0)) throw DomainError("p must exceed 1");
  if (!(alpha > 0.0) || !(dim - alpha * p > 0.0))
    throw DomainError("need 0 < alpha and alpha*p < dim");
  if (!(effective_s() > 0.0)) throw DomainError("s must be positive");
}

void to_json(nlohmann::json& j, const AdamsCheckConfig& config) {
  j = nlohmann::json{{"mode", ops::to_string(config.mode)},
                     {"trials", config.trials},
                     {"seed", config.seed},
                     {"dim", config.dim},
                     {"alpha", config.alpha},
                     {"p", config.p},
                     {"s", config.effective_s()},
                     {"cells", config.cells},
                     {"max_level", config.max_level},
                     {"family_size", config.family_size}};
}

void to_json(nlohmann::json& j, const AdamsCheckReport& report) {
  j = nlohmann::json{{"config", report.config},
                     {"beta", report.beta},
                     {"max_ratio", report.max_ratio},
                     {"max_ratio_refined", report.max_ratio_refined},
                     {"max_ratio_doubled", report.max_ratio_doubled},
                     {"refine_factor", report.refine_factor},
                     {"doubling_factor", report.doubling_factor},
                     {"stable", report.stable},
                     {"ratios", report.ratios}};
}

AdamsCheckReport run_adams_check(const AdamsCheckConfig& config) {
  config.validate();
  const double n = config.dim;
  const double s = config.effective_s();
  const double beta = config.mode == ops::AdamsMode::lorentz
                          ? n - config.alpha * config.p
                          : (s / config.p) * (n - config.alpha * config.p);

  const int total = 2 * config.trials;
  std::vector<double> coarse(total, 0.0), fine(config.trials, 0.0);
  parallel_for(total, [&](int t) {
    Rng rng = trial_rng(config.seed, t);
    const double tau = beta + (n - beta) * uniform01(rng);
    const dyadic::RegularFamily family = dyadic::regularize(
        synth::random_family_in_unit_box(rng, config.dim, config.max_level,
                                         config.family_size, tau));
    const dyadic::FrostmanMeasure mu(family);
    const grid::GridFunction g =
        synth::random_grid(rng, config.dim, {0.0, 0.0}, 1.0, config.cells, 0.0, 1.0);
    coarse[t] = ops::adams_ratio(g, mu, config.alpha, config.p, s, config.mode);
    if (t < config.trials)
      fine[t] = ops::adams_ratio(g.refined(), mu, config.alpha, config.p, s, config.mode);
  });

  AdamsCheckReport report;
  report.config = config;
  report.beta = beta;
  report.max_ratio = *std::max_element(coarse.begin(), coarse.begin() + config.trials);
  report.max_ratio_refined = *std::max_element(fine.begin(), fine.end());
  report.max_ratio_doubled = *std::max_element(coarse.begin(), coarse.end());
  report.refine_factor =
      report.max_ratio > 0.0 ? report.max_ratio_refined / report.max_ratio : 1.0;
  report.doubling_factor =
      report.max_ratio > 0.0 ? report.max_ratio_doubled / report.max_ratio : 1.0;
  report.stable = std::isfinite(report.max_ratio) && report.refine_factor > 0.5 &&
                  report.refine_factor < 2.0 && report.doubling_factor < 2.0;
  report.ratios.assign(coarse.begin(), coarse.begin() + config.trials);
  return report;
}

void DiamCheckConfig::validate() const {
  if (trials < 1) throw DomainError("trials must be positive");
  if (level_lo < 0 || level_hi < level_lo || level_hi > 20)
    throw DomainError("need 0 <= level_lo <= level_hi <= 20");
  const int align = 1 << (level_hi + 2);
  if (cells < align || cells % align != 0 || cells > 16384)
    throw DomainError("cells must be a multiple of 2^(level_hi+2)");
}

void to_json(nlohmann::json& j, const DiamCheckConfig& config) {
  j = nlohmann::json{{"mode", ops::to_string(config.mode)},
                     {"trials", config.trials},
                     {"seed", config.seed},
                     {"alpha", config.alpha},
                     {"p", config.p},
                     {"theta", config.theta},
                     {"cells", config.cells},
                     {"level_lo", config.level_lo},
                     {"level_hi", config.level_hi}};
}

void to_json(nlohmann::json& j, const DiamCheckReport& report) {
  j = nlohmann::json{{"config", report.config},
                     {"max_ratio", report.max_ratio},
                     {"max_ratio_refined", report.max_ratio_refined},
                     {"refine_factor", report.refine_factor},
                     {"zero_input_ratio", report.zero_input_ratio},
                     {"stable", report.stable},
                     {"ratios", report.ratios}};
}

DiamCheckReport run_diam_check(const DiamCheckConfig& config) {
  config.validate();
  std::vector<double> coarse(config.trials, 0.0), fine(config.trials, 0.0);
  parallel_for(config.trials, [&](int t) {
    Rng rng = trial_rng(config.seed, t);
    const grid::GridFunction g =
        synth::random_grid(rng, 1, {-2.0, 0.0}, 4.0, config.cells, -1.0, 1.0);
    const dyadic::DyadicCube q =
        synth::random_cube_in_sym_box(rng, 1, config.level_lo, config.level_hi);
    coarse[t] =
        ops::diam_bound_check(g, q, config.alpha, config.p, config.theta, config.mode).ratio;
    fine[t] = ops::diam_bound_check(g.refined(), q, config.alpha, config.p, config.theta,
                                    config.mode)
                  .ratio;
  });

  DiamCheckReport report;
  report.config = config;
  report.max_ratio = *std::max_element(coarse.begin(), coarse.end());
  report.max_ratio_refined = *std::max_element(fine.begin(), fine.end());
  report.refine_factor =
      report.max_ratio > 0.0 ? report.max_ratio_refined / report.max_ratio : 1.0;

  const grid::GridFunction zero = grid::make_grid(1, {-2.0, 0.0}, 4.0, config.cells);
  dyadic::DyadicCube q0;
  q0.level = config.level_lo;
  q0.coords = {0};
  report.zero_input_ratio =
      ops::diam_bound_check(zero, q0, config.alpha, config.p, config.theta, config.mode)
          .ratio;
  report.stable = std::isfinite(report.max_ratio) && report.refine_factor > 0.5 &&
                  report.refine_factor < 2.0;
  report.ratios = std::move(coarse);
  return report;
}

}  // namespace hlab::expt
