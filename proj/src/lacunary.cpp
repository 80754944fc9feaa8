#include "hlab/lacunary.hpp"

#include <algorithm>
#include <cmath>

#include "hlab/errors.hpp"
#include "hlab/operators.hpp"
#include "hlab/rng.hpp"

namespace hlab::cex {

namespace {

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double hi = v[mid];
  if (v.size() % 2 == 0) {
    const double lo = *std::max_element(v.begin(), v.begin() + mid);
    return 0.5 * (lo + hi);
  }
  return hi;
}

double oscillation_over_final_half(const std::vector<double>& quotients) {
  if (quotients.empty()) return 0.0;
  const std::size_t start = quotients.size() / 2;
  double lo = quotients[start], hi = quotients[start];
  for (std::size_t j = start; j < quotients.size(); ++j) {
    lo = std::min(lo, quotients[j]);
    hi = std::max(hi, quotients[j]);
  }
  return hi - lo;
}

}  // namespace

void LacunarySeries::validate() const {
  if (!(base > 1.0)) throw DomainError("lacunary base must exceed 1");
  if (!(sigma > 0.0)) throw DomainError("coefficient exponent sigma must be positive");
  if (truncation < 1) throw DomainError("truncation must be at least 1");
}

std::optional<std::string> regime_warning(const LacunarySeries& series) {
  if (series.sigma > 1.0 / 3.0 && series.sigma < 0.5) return std::nullopt;
  return "sigma outside (1/3, 1/2): the oscillation calibration does not apply";
}

double tail_bound(const LacunarySeries& series) {
  return std::pow(series.base, -series.truncation) / (series.base - 1.0);
}

int terms_for_tolerance(double base, double tolerance) {
  if (!(base > 1.0)) throw DomainError("lacunary base must exceed 1");
  if (!(tolerance > 0.0)) throw DomainError("tolerance must be positive");
  // Smallest M with base^-M / (base - 1) <= tolerance.
  const double m = -std::log(tolerance * (base - 1.0)) / std::log(base);
  return std::max(1, static_cast<int>(std::ceil(m - 1e-12)));
}

double evaluate(const LacunarySeries& series, double x) {
  series.validate();
  // Ascending m with compensated accumulation: the terms span the full
  // geometric range base^-1 .. base^-M.
  double sum = 0.0, comp = 0.0;
  for (int m = 1; m <= series.truncation; ++m) {
    const double term =
        std::pow(series.base, -m) * std::pow(m, -series.sigma) * std::cos(std::pow(series.base, m) * x);
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return series.envelope ? std::exp(-x * x) * sum : sum;
}

double evaluate_to_tolerance(const LacunarySeries& series, double x, double tolerance) {
  LacunarySeries use = series;
  use.truncation = std::max(series.truncation, terms_for_tolerance(series.base, tolerance));
  return evaluate(use, x);
}

QuotientProbe difference_quotient_probe(const std::function<double(double)>& f, double x,
                                        std::span<const double> scales) {
  if (scales.empty()) throw DomainError("at least one scale required");
  for (std::size_t j = 0; j < scales.size(); ++j) {
    if (scales[j] == 0.0 || !std::isfinite(scales[j]))
      throw DomainError("scales must be finite and nonzero");
    if (j > 0 && std::fabs(scales[j]) > std::fabs(scales[j - 1]) + 1e-15)
      throw DomainError("scale magnitudes must be nonincreasing");
  }
  QuotientProbe probe;
  probe.x = x;
  probe.scales.assign(scales.begin(), scales.end());
  const double fx = f(x);
  probe.quotients.reserve(scales.size());
  for (double h : scales) probe.quotients.push_back((f(x + h) - fx) / h);
  probe.oscillation = oscillation_over_final_half(probe.quotients);
  return probe;
}

QuotientProbe difference_quotient_probe(const LacunarySeries& series, double x,
                                        std::span<const double> scales) {
  series.validate();
  if (scales.empty()) throw DomainError("at least one scale required");
  double min_scale = scales.front();
  for (std::size_t j = 0; j < scales.size(); ++j) {
    if (!(scales[j] > 0.0)) throw DomainError("series probe scales must be positive");
    if (j > 0 && !(scales[j] < scales[j - 1]))
      throw DomainError("series probe scales must be strictly decreasing");
    min_scale = scales[j];
  }
  // The quotient at scale h carries truncation error 2*tail/h and roundoff
  // about 1e-16/h; both must stay far below an O(1) quotient.
  if (min_scale < 1e-12)
    throw NumericalError("smallest scale is below double-precision resolution");
  if (tail_bound(series) > 1e-3 * min_scale)
    throw NumericalError("truncation too coarse for the smallest probe scale");
  return difference_quotient_probe(
      [&series](double t) { return evaluate(series, t); }, x, scales);
}

std::vector<double> geometric_scales(double base, int j_lo, int j_hi) {
  if (!(base > 1.0)) throw DomainError("lacunary base must exceed 1");
  if (j_hi < j_lo) throw DomainError("empty scale range");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(j_hi - j_lo + 1));
  for (int j = j_lo; j <= j_hi; ++j) out.push_back(std::pow(base, -j));
  return out;
}

OscillationStats oscillation_statistic(const std::function<double(double)>& f, int points,
                                       std::uint64_t seed, std::span<const double> scales) {
  if (points < 1) throw DomainError("need at least one probe point");
  OscillationStats stats;
  stats.points = points;
  stats.seed = seed;
  stats.scales.assign(scales.begin(), scales.end());
  std::vector<double> abs_quotients;
  abs_quotients.reserve(static_cast<std::size_t>(points) * scales.size());
  Rng rng = seeded_rng(seed);
  for (int i = 0; i < points; ++i) {
    const double x = uniform(rng, -1.0, 1.0);
    QuotientProbe probe = difference_quotient_probe(f, x, scales);
    stats.points_x.push_back(x);
    stats.per_point_oscillation.push_back(probe.oscillation);
    for (double q : probe.quotients) abs_quotients.push_back(std::fabs(q));
    stats.per_point_quotients.push_back(std::move(probe.quotients));
  }
  stats.median_oscillation = median_of(stats.per_point_oscillation);
  stats.median_abs_quotient = median_of(std::move(abs_quotients));
  return stats;
}

OscillationStats oscillation_statistic(const LacunarySeries& series, int points,
                                       std::uint64_t seed, std::span<const double> scales) {
  series.validate();
  if (!scales.empty()) {
    const double min_scale = *std::min_element(scales.begin(), scales.end());
    if (min_scale < 1e-12)
      throw NumericalError("smallest scale is below double-precision resolution");
    if (tail_bound(series) > 1e-3 * min_scale)
      throw NumericalError("truncation too coarse for the smallest probe scale");
  }
  return oscillation_statistic([&series](double t) { return evaluate(series, t); }, points,
                               seed, scales);
}

BesovProbe besov_membership_probe(const std::function<double(double)>& f, double p,
                                  double half_width, int cells,
                                  std::span<const int> window_cells) {
  if (!(p > 0.0)) throw DomainError("p must be positive");
  if (!(half_width > 0.0)) throw DomainError("half_width must be positive");
  if (cells < 8) throw DomainError("grid too coarse for the modulus probe");
  if (window_cells.size() < 2) throw DomainError("need at least two window widths");

  grid::GridFunction g = grid::make_grid(1, {-half_width, 0.0}, 2.0 * half_width, cells);
  for (int i = 0; i < cells; ++i) g.values[i] = f(g.center(0, i));
  const double h = g.h();

  BesovProbe probe;
  probe.box_side = 2.0 * half_width;
  probe.cells = cells;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int used = 0;
  for (int m : window_cells) {
    if (m < 1 || m > cells / 2) throw DomainError("window width out of range");
    const double t = m * h;
    const double norm = ops::besov_modulus_norm(g, 1, t, p);
    probe.windows.push_back(t);
    probe.norms.push_back(norm);
    if (norm > 0.0) {
      const double lx = std::log(t), ly = std::log(norm);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++used;
    }
  }
  if (used < 2) {
    probe.slope = 0.0;  // identically-zero modulus: nothing to fit
    return probe;
  }
  probe.slope = (used * sxy - sx * sy) / (used * sxx - sx * sx);
  return probe;
}

BesovProbe besov_membership_probe(const LacunarySeries& series, double p) {
  series.validate();
  const int windows[] = {4, 8, 16, 32, 64, 128};
  return besov_membership_probe([&series](double t) { return evaluate(series, t); }, p, 4.0,
                                1 << 14, windows);
}

}  // namespace hlab::cex
