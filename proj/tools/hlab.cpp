#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hlab/bessel.hpp"
#include "hlab/errors.hpp"
#include "hlab/experiments.hpp"
#include "hlab/exponents.hpp"
#include "hlab/fractal.hpp"
#include "hlab/grid.hpp"
#include "hlab/lacunary.hpp"
#include "hlab/operators.hpp"
#include "hlab/report.hpp"

namespace {

using nlohmann::json;

struct CommonOpts {
  std::string format = "json";
  std::string output;
};

void add_common(CLI::App* sub, CommonOpts& common) {
  sub->add_option("--format", common.format, "output format")
      ->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--output", common.output, "write the payload to a file instead of stdout");
}

void emit(const CommonOpts& common, const json& envelope, const std::string& csv) {
  std::string payload = common.format == "csv" ? csv : envelope.dump(2) + "\n";
  if (common.output.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(common.output);
  if (!out) throw hlab::DomainError("cannot open output file: " + common.output);
  out << payload;
}

std::pair<int, int> parse_levels(const std::string& text) {
  const auto pos = text.find("..");
  if (pos == std::string::npos)
    throw hlab::DomainError("levels must be a range like 4..9");
  try {
    const int lo = std::stoi(text.substr(0, pos));
    const int hi = std::stoi(text.substr(pos + 2));
    if (hi < lo) throw hlab::DomainError("levels range is empty");
    return {lo, hi};
  } catch (const hlab::DomainError&) {
    throw;
  } catch (const std::exception&) {
    throw hlab::DomainError("levels must be a range like 4..9");
  }
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw hlab::DomainError("cannot open input file: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw hlab::DomainError("invalid JSON in " + path + ": " + e.what());
  }
}

hlab::grid::GridFunction load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw hlab::DomainError("cannot open input file: " + path);
  return hlab::grid::read_csv(in);
}

hlab::fractal::PointSet load_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw hlab::DomainError("cannot open input file: " + path);
  return hlab::fractal::read_csv(in);
}

std::string family_csv(const hlab::dyadic::CubeFamily& family) {
  std::ostringstream out;
  out << "level";
  for (int a = 0; a < std::max(family.dim(), 1); ++a) out << ",coord" << a;
  out << "\n";
  for (const auto& cube : family.cubes) {
    out << cube.level;
    for (auto c : cube.coords) out << "," << c;
    out << "\n";
  }
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hlab: a desk-scale laboratory for dimension distortion under Sobolev maps"};
  app.require_subcommand(1);
  app.set_version_flag("--version", hlab::report::kVersion);
  app.set_config("--config", "", "key=value config file (flags override file values)");
  app.option_defaults()->always_capture_default();

  CommonOpts common;

  // ---- exponents ----------------------------------------------------------
  struct {
    int n = 1;
    double alpha = 1.0, p = 2.0;
    std::optional<double> tau, q;
    std::optional<int> k, m;
    bool lorentz = false;
  } expo;
  {
    auto* sub = app.add_subcommand("exponents", "critical and image-dimension exponents");
    sub->add_option("--n", expo.n, "ambient dimension");
    sub->add_option("--alpha", expo.alpha, "smoothness order");
    sub->add_option("--p", expo.p, "integrability exponent");
    sub->add_option("--tau", expo.tau, "input dimension for sigma(tau)");
    sub->add_option("--k", expo.k, "derivative order for the slice exponent");
    sub->add_option("--m", expo.m, "slice parameter m");
    sub->add_option("--q", expo.q, "image exponent for mu_q (needs --k and --m)");
    sub->add_flag("--lorentz", expo.lorentz, "admit the borderline alpha*p == n");
    add_common(sub, common);
    sub->callback([&] {
      hlab::exponents::DistortionParams params{expo.n, expo.alpha, expo.p, expo.k, expo.m,
                                               expo.lorentz};
      params.validate();
      const double ts = hlab::exponents::tau_star(params);
      json results{{"tau_star", ts},
                   {"regime_flags",
                    {{"supercritical", expo.alpha * expo.p > expo.n},
                     {"borderline", expo.alpha * expo.p == expo.n},
                     {"fully_supercritical", ts <= 0.0}}}};
      if (expo.k && expo.m) {
        results["beta_bar"] = hlab::exponents::beta_bar(expo.n, *expo.m, *expo.k, expo.alpha);
        if (expo.q)
          results["mu_q"] = hlab::exponents::mu_q(expo.n, *expo.m, *expo.k, expo.alpha, *expo.q);
      }
      if (expo.tau) {
        const auto res = hlab::exponents::sigma(params, *expo.tau);
        results["sigma"] = res.value;
        results["sigma_regime"] = hlab::exponents::to_string(res.regime);
      }
      json config = hlab::expt::params_json(params);
      if (expo.tau) config["tau"] = *expo.tau;
      if (expo.q) config["q"] = *expo.q;
      std::ostringstream csv;
      csv << std::setprecision(17) << "key,value\n";
      for (const auto& [key, value] : results.items())
        if (!value.is_structured()) csv << key << "," << value.dump() << "\n";
      emit(common, hlab::report::make_report(config, results), csv.str());
    });
  }

  // ---- regularize ---------------------------------------------------------
  struct {
    std::string input, output;
    int root_exponent = hlab::dyadic::kDefaultRootExponent;
  } reg;
  {
    auto* sub = app.add_subcommand("regularize", "regularize a dyadic cube family");
    sub->add_option("--input", reg.input, "family JSON file")->required();
    sub->add_option("--output", reg.output, "write the regularized family JSON here");
    sub->add_option("--root-exponent", reg.root_exponent, "root cube is [-2^L, 2^L]^n");
    sub->add_option("--format", common.format, "stdout format")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->callback([&] {
      const auto family = load_json(reg.input).get<hlab::dyadic::CubeFamily>();
      const auto regular = hlab::dyadic::regularize(family, reg.root_exponent);
      json family_json = regular.family();
      if (!reg.output.empty()) {
        std::ofstream out(reg.output);
        if (!out) throw hlab::DomainError("cannot open output file: " + reg.output);
        out << family_json.dump(2) << "\n";
      }
      json config{{"input", reg.input},
                  {"output", reg.output},
                  {"root_exponent", reg.root_exponent}};
      json results{{"tau", family.tau},
                   {"input_cubes", family.cubes.size()},
                   {"output_cubes", regular.cubes().size()},
                   {"tau_weight_input", family.tau_weight()},
                   {"tau_weight_output", regular.family().tau_weight()},
                   {"family", family_json}};
      CommonOpts stdout_only{common.format, ""};
      emit(stdout_only, hlab::report::make_report(config, results),
           family_csv(regular.family()));
    });
  }

  // ---- estimate-dim -------------------------------------------------------
  struct {
    std::string input;
    std::string levels = "4..10";
  } dim;
  {
    auto* sub = app.add_subcommand("estimate-dim", "box-counting dimension of a point set");
    sub->add_option("--input", dim.input, "point-set CSV file")->required();
    sub->add_option("--levels", dim.levels, "dyadic level range, e.g. 4..10");
    add_common(sub, common);
    sub->callback([&] {
      const auto [lo, hi] = parse_levels(dim.levels);
      const auto set = load_points(dim.input);
      const auto est = hlab::fractal::box_dimension(set, lo, hi);
      json est_json;
      hlab::fractal::to_json(est_json, est);
      json config{{"input", dim.input},
                  {"levels", dim.levels},
                  {"generator", set.generator},
                  {"seed", set.seed},
                  {"points", set.points.size()}};
      std::ostringstream csv;
      csv << std::setprecision(17) << "level,count\n";
      for (std::size_t i = 0; i < est.scales_used.size(); ++i)
        csv << est.scales_used[i] << "," << est.counts[i] << "\n";
      csv << "# dimension=" << est.value << " residual=" << est.fit_residual << "\n";
      emit(common, hlab::report::make_report(config, est_json), csv.str());
    });
  }

  // ---- operators ----------------------------------------------------------
  struct {
    std::string op;
    std::string input;
    std::optional<double> order;
  } oper;
  {
    auto* sub = app.add_subcommand("operators", "apply a potential-theoretic operator");
    sub->add_option("--op", oper.op, "operator")
        ->required()
        ->check(CLI::IsMember({"maximal", "riesz", "bessel"}));
    sub->add_option("--input", oper.input, "grid CSV file")->required();
    sub->add_option("--order", oper.order,
                    "operator order (beta for maximal/riesz, alpha for bessel)");
    add_common(sub, common);
    sub->callback([&] {
      const auto g = load_grid(oper.input);
      hlab::grid::GridFunction out;
      if (oper.op == "maximal") {
        out = hlab::ops::maximal(g, oper.order.value_or(0.0));
      } else if (oper.op == "riesz") {
        if (!oper.order) throw hlab::DomainError("--order is required for riesz");
        out = hlab::ops::riesz_potential(g, *oper.order);
      } else {
        if (!oper.order) throw hlab::DomainError("--order is required for bessel");
        out = hlab::ops::bessel_potential(g, *oper.order);
      }
      // The payload is always the transformed grid as CSV, independent of
      // --format: grids are tabular by nature.
      std::ostringstream csv;
      hlab::grid::write_csv(csv, out);
      emit(CommonOpts{"csv", common.output}, json{}, csv.str());
    });
  }

  // ---- adams-check --------------------------------------------------------
  hlab::expt::AdamsCheckConfig adams;
  std::optional<double> adams_s;
  {
    const std::map<std::string, hlab::ops::AdamsMode> modes{
        {"riesz", hlab::ops::AdamsMode::riesz},
        {"maximal", hlab::ops::AdamsMode::maximal},
        {"lorentz", hlab::ops::AdamsMode::lorentz}};
    auto* sub = app.add_subcommand("adams-check", "trace-inequality stability harness");
    sub->add_option("--mode", adams.mode, "trace mode")
        ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
    sub->add_option("--trials", adams.trials, "number of seeded trials");
    sub->add_option("--seed", adams.seed, "experiment seed");
    sub->add_option("--dim", adams.dim, "ambient dimension (1 or 2)");
    sub->add_option("--alpha", adams.alpha, "potential order");
    sub->add_option("--p", adams.p, "integrability exponent");
    sub->add_option("--s", adams_s, "trace exponent (defaults per mode)");
    sub->add_option("--cells", adams.cells, "grid cells per axis");
    add_common(sub, common);
    sub->callback([&] {
      adams.s = adams_s;
      const auto report = hlab::expt::run_adams_check(adams);
      std::ostringstream csv;
      csv << std::setprecision(17) << "trial,ratio\n";
      for (std::size_t i = 0; i < report.ratios.size(); ++i)
        csv << i << "," << report.ratios[i] << "\n";
      csv << "# max_ratio=" << report.max_ratio
          << " refine_factor=" << report.refine_factor
          << " doubling_factor=" << report.doubling_factor << " stable=" << report.stable
          << "\n";
      emit(common, hlab::report::make_report(json(adams), json(report)), csv.str());
    });
  }

  // ---- diam-check ---------------------------------------------------------
  hlab::expt::DiamCheckConfig diam;
  {
    const std::map<std::string, hlab::ops::DiamMode> modes{
        {"riesz", hlab::ops::DiamMode::riesz},
        {"maximal", hlab::ops::DiamMode::maximal},
        {"lorentz", hlab::ops::DiamMode::lorentz}};
    auto* sub = app.add_subcommand("diam-check", "diameter-bound stability harness");
    sub->add_option("--mode", diam.mode, "bound mode")
        ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
    sub->add_option("--trials", diam.trials, "number of seeded trials");
    sub->add_option("--seed", diam.seed, "experiment seed");
    sub->add_option("--alpha", diam.alpha, "potential order");
    sub->add_option("--p", diam.p, "integrability exponent");
    sub->add_option("--theta", diam.theta, "maximal-term shift");
    sub->add_option("--cells", diam.cells, "grid cells");
    sub->add_option("--level-lo", diam.level_lo, "coarsest cube level");
    sub->add_option("--level-hi", diam.level_hi, "finest cube level");
    add_common(sub, common);
    sub->callback([&] {
      const auto report = hlab::expt::run_diam_check(diam);
      std::ostringstream csv;
      csv << std::setprecision(17) << "trial,ratio\n";
      for (std::size_t i = 0; i < report.ratios.size(); ++i)
        csv << i << "," << report.ratios[i] << "\n";
      csv << "# max_ratio=" << report.max_ratio
          << " refine_factor=" << report.refine_factor << " stable=" << report.stable
          << "\n";
      emit(common, hlab::report::make_report(json(diam), json(report)), csv.str());
    });
  }

  // ---- counterexample -----------------------------------------------------
  struct {
    double sigma = 0.4;
    double base = 5.0;
    int terms = 40;
    bool no_envelope = false;
    std::string probe = "quotients";
    std::uint64_t seed = 0;
    int points = 200;
    int j_lo = 3, j_hi = 10;
    double p = 3.0;
  } cex;
  {
    auto* sub = app.add_subcommand("counterexample", "lacunary-series probes");
    sub->add_option("--sigma", cex.sigma, "coefficient exponent");
    sub->add_option("--base", cex.base, "lacunary base");
    sub->add_option("--terms", cex.terms, "truncation order");
    sub->add_flag("--no-envelope", cex.no_envelope, "drop the Gaussian envelope");
    sub->add_option("--probe", cex.probe, "probe kind")
        ->check(CLI::IsMember({"quotients", "besov"}));
    sub->add_option("--seed", cex.seed, "probe seed");
    sub->add_option("--points", cex.points, "number of probe points");
    sub->add_option("--j-lo", cex.j_lo, "coarsest scale exponent (scale = base^-j)");
    sub->add_option("--j-hi", cex.j_hi, "finest scale exponent");
    sub->add_option("--p", cex.p, "norm exponent for the besov probe");
    add_common(sub, common);
    sub->callback([&] {
      hlab::cex::LacunarySeries series{cex.sigma, cex.base, !cex.no_envelope, cex.terms};
      series.validate();
      json config{{"sigma", series.sigma},      {"base", series.base},
                  {"envelope", series.envelope}, {"terms", series.truncation},
                  {"probe", cex.probe},          {"seed", cex.seed},
                  {"points", cex.points},        {"j_lo", cex.j_lo},
                  {"j_hi", cex.j_hi},            {"p", cex.p}};
      json results;
      if (const auto warning = hlab::cex::regime_warning(series))
        results["warning"] = *warning;
      std::ostringstream csv;
      csv << std::setprecision(17);
      if (cex.probe == "quotients") {
        const auto scales = hlab::cex::geometric_scales(cex.base, cex.j_lo, cex.j_hi);
        const auto stats =
            hlab::cex::oscillation_statistic(series, cex.points, cex.seed, scales);
        const auto control = hlab::cex::oscillation_statistic(
            [](double t) { return std::sin(t); }, cex.points, cex.seed, scales);
        results["scales"] = stats.scales;
        results["points_x"] = stats.points_x;
        results["per_point_quotients"] = stats.per_point_quotients;
        results["per_point_oscillation"] = stats.per_point_oscillation;
        results["median_oscillation"] = stats.median_oscillation;
        results["median_abs_quotient"] = stats.median_abs_quotient;
        results["control_median_oscillation"] = control.median_oscillation;
        results["separation"] = control.median_oscillation > 0.0
                                    ? stats.median_oscillation / control.median_oscillation
                                    : 0.0;
        results["tail_bound"] = hlab::cex::tail_bound(series);
        csv << "point,x,oscillation\n";
        for (std::size_t i = 0; i < stats.per_point_oscillation.size(); ++i)
          csv << i << "," << stats.points_x[i] << "," << stats.per_point_oscillation[i]
              << "\n";
        csv << "# median_oscillation=" << stats.median_oscillation
            << " separation=" << results["separation"].get<double>() << "\n";
      } else {
        const auto probe = hlab::cex::besov_membership_probe(series, cex.p);
        results["slope"] = probe.slope;
        results["windows"] = probe.windows;
        results["norms"] = probe.norms;
        results["box_side"] = probe.box_side;
        results["cells"] = probe.cells;
        csv << "window,norm\n";
        for (std::size_t i = 0; i < probe.windows.size(); ++i)
          csv << probe.windows[i] << "," << probe.norms[i] << "\n";
        csv << "# slope=" << probe.slope << "\n";
      }
      emit(common, hlab::report::make_report(config, results), csv.str());
    });
  }

  // ---- distortion ---------------------------------------------------------
  hlab::expt::ExperimentConfig dist;
  std::optional<double> nstar_q;
  {
    auto* sub = app.add_subcommand("distortion", "end-to-end dimension-distortion run");
    sub->add_option("--scenario", dist.scenario,
                    "cantor_identity | cantor_holder | cantor_bessel");
    sub->add_option("--seed", dist.seed, "experiment seed");
    sub->add_option("--n", dist.params.n, "ambient dimension");
    sub->add_option("--alpha", dist.params.alpha, "smoothness order");
    sub->add_option("--p", dist.params.p, "integrability exponent");
    sub->add_option("--grid-exponent", dist.grid_exponent, "map grid has 2^k cells");
    sub->add_option("--trials", dist.trials, "trial count (recorded)");
    sub->add_option("--ratio", dist.cantor_ratio, "Cantor contraction ratio");
    sub->add_option("--depth", dist.cantor_depth, "Cantor construction depth");
    sub->add_option("--level-min", dist.level_min, "coarsest cover level");
    sub->add_option("--level-max", dist.level_max, "finest cover level");
    sub->add_option("--gamma", dist.holder_gamma, "Hoelder exponent for cantor_holder");
    sub->add_option("--nstar-q", nstar_q, "also run the slice check at this q");
    add_common(sub, common);
    sub->callback([&] {
      const auto report = hlab::expt::run_distortion_experiment(dist);
      json results(report);
      if (nstar_q) results["nstar"] = hlab::expt::run_nstar_slice_check(dist, *nstar_q);
      std::ostringstream csv;
      csv << std::setprecision(17)
          << "level,cover_size,tau_sum,sigma_sum,codecay_bound,codecay_ok\n";
      for (const auto& row : report.rows)
        csv << row.level << "," << row.cover_size << "," << row.tau_sum << ","
            << row.sigma_sum << "," << row.codecay_bound << "," << row.codecay_ok << "\n";
      csv << "# dim_set=" << report.dim_set.value << " dim_image=" << report.dim_image.value
          << " tau=" << report.tau << " sigma=" << report.sigma << "\n";
      emit(common, hlab::report::make_report(json(dist), results), csv.str());
    });
  }

  // ---- phi ----------------------------------------------------------------
  struct {
    std::string input;
    std::string grid;
    bool identity = false;
    double mu = 0.0;
    double q = 1.0;
    std::string levels = "4..9";
  } phi;
  {
    auto* sub = app.add_subcommand("phi", "covering set-function upper bound");
    sub->add_option("--input", phi.input, "point-set CSV file")->required();
    sub->add_option("--grid", phi.grid, "map sampled as a grid CSV file");
    sub->add_flag("--identity", phi.identity, "use the identity map");
    sub->add_option("--mu", phi.mu, "cube-side exponent");
    sub->add_option("--q", phi.q, "image-diameter exponent");
    sub->add_option("--levels", phi.levels, "cover level range, e.g. 4..9");
    add_common(sub, common);
    sub->callback([&] {
      if (phi.identity == !phi.grid.empty())
        throw hlab::DomainError("specify exactly one of --grid or --identity");
      const auto set = load_points(phi.input);
      const auto [lo, hi] = parse_levels(phi.levels);
      std::vector<int> levels;
      for (int l = lo; l <= hi; ++l) levels.push_back(l);
      hlab::expt::PhiEstimate est;
      if (phi.identity) {
        est = hlab::expt::phi_estimate(
            set, [](double x) { return x; }, phi.mu, phi.q, levels);
      } else {
        est = hlab::expt::phi_estimate(set, load_grid(phi.grid), phi.mu, phi.q, levels);
      }
      json config{{"input", phi.input},   {"grid", phi.grid}, {"identity", phi.identity},
                  {"mu", phi.mu},         {"q", phi.q},       {"levels", phi.levels},
                  {"seed", set.seed},     {"generator", set.generator}};
      std::ostringstream csv;
      csv << std::setprecision(17) << "level,phi_sum\n";
      for (std::size_t i = 0; i < est.per_level.size(); ++i)
        csv << est.levels[i] << "," << est.per_level[i] << "\n";
      csv << "# min=" << est.value << " at_level=" << est.level << "\n";
      emit(common, hlab::report::make_report(config, json(est)), csv.str());
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    json err{{"error", {{"type", "usage"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n" << app.help() << std::endl;
    return 2;
  } catch (const hlab::NumericalError& e) {
    json err{{"error", {{"type", "numerical"}, {"message", e.what()}}}};
    std::cerr << err.dump() << std::endl;
    return 3;
  } catch (const hlab::DomainError& e) {
    json err{{"error", {{"type", "domain"}, {"message", e.what()}}}};
    std::cerr << err.dump() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    json err{{"error", {{"type", "internal"}, {"message", e.what()}}}};
    std::cerr << err.dump() << std::endl;
    return 1;
  }
  return 0;
}
