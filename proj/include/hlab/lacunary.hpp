#pragma once
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hlab/grid.hpp"

namespace hlab::cex {

// Truncated lacunary series  f(x) = [envelope] * sum_{m=1..M} base^-m m^-sigma cos(base^m x)
// with the Gaussian envelope e^{-x^2}. Since the coefficients m^-sigma are
// at most 1, the truncation error is certified by the geometric tail
//   sup_x |f - f_M| <= sum_{m>M} base^-m = base^-M / (base - 1).
struct LacunarySeries {
  double sigma = 0.4;
  double base = 5.0;
  bool envelope = true;
  int truncation = 40;

  void validate() const;  // base > 1, sigma > 0, truncation >= 1
};

// The oscillation analysis is calibrated to sigma in (1/3, 1/2); outside that
// window the series is still evaluable, with a warning instead of an error.
std::optional<std::string> regime_warning(const LacunarySeries& series);

double tail_bound(const LacunarySeries& series);
int terms_for_tolerance(double base, double tolerance);

double evaluate(const LacunarySeries& series, double x);
// Same, raising the truncation if needed so tail_bound <= tolerance.
double evaluate_to_tolerance(const LacunarySeries& series, double x, double tolerance);

// quotients[j] = (f(x + h_j) - f(x)) / h_j. The oscillation statistic is
// max - min of the quotients over the final half of the scale list; it stays
// bounded away from zero for the lacunary series and decays like h for C^1
// functions.
struct QuotientProbe {
  double x = 0.0;
  std::vector<double> scales;
  std::vector<double> quotients;
  double oscillation = 0.0;
};

// Generic probe: scales must be nonzero with nonincreasing magnitude (signed
// scales probe one-sided quotients).
QuotientProbe difference_quotient_probe(const std::function<double(double)>& f, double x,
                                        std::span<const double> scales);
// Series probe: scales positive and strictly decreasing; the truncation must
// certify an error well below the smallest scale, and the smallest scale must
// stay above double-precision roundoff, else NumericalError.
QuotientProbe difference_quotient_probe(const LacunarySeries& series, double x,
                                        std::span<const double> scales);

std::vector<double> geometric_scales(double base, int j_lo, int j_hi);

// Batch statistic over seeded uniform points in [-1, 1]: the median per-point
// oscillation and the median |quotient| pooled over all points and scales.
struct OscillationStats {
  int points = 0;
  std::uint64_t seed = 0;
  std::vector<double> scales;
  std::vector<double> points_x;
  std::vector<std::vector<double>> per_point_quotients;
  std::vector<double> per_point_oscillation;
  double median_oscillation = 0.0;
  double median_abs_quotient = 0.0;
};

OscillationStats oscillation_statistic(const std::function<double(double)>& f, int points,
                                       std::uint64_t seed, std::span<const double> scales);
OscillationStats oscillation_statistic(const LacunarySeries& series, int points,
                                       std::uint64_t seed, std::span<const double> scales);

// Diagnostic smoothness probe: sample f on a uniform grid, compute the
// first-order local oscillation modulus at a ladder of window widths, and
// report the log-log slope of its L^p norm against the window width. Slope
// near 1 indicates a Lipschitz gradient; the lacunary series sits lower.
struct BesovProbe {
  double slope = 0.0;
  std::vector<double> windows;
  std::vector<double> norms;
  double box_side = 0.0;
  int cells = 0;
};

BesovProbe besov_membership_probe(const std::function<double(double)>& f, double p,
                                  double half_width, int cells,
                                  std::span<const int> window_cells);
BesovProbe besov_membership_probe(const LacunarySeries& series, double p);

}  // namespace hlab::cex
