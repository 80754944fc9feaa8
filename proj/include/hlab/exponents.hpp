#pragma once
#include <optional>

namespace hlab::exponents {

// Parameter bundle for the dimension-distortion exponent formulas.
// n: ambient dimension, alpha: smoothness order, p: integrability exponent.
// k and m extend the bundle for the higher-order / slice formulas.
// lorentz_mode admits the borderline alpha*p == n.
struct DistortionParams {
  int n = 1;
  double alpha = 1.0;
  double p = 2.0;
  std::optional<int> k{};
  std::optional<int> m{};
  bool lorentz_mode = false;

  void validate() const;               // throws DomainError
  void require_supercritical() const;  // alpha*p > n (>= n in lorentz_mode), throws RegimeError
};

// Critical input dimension tau_* = n - (alpha - 1) * p.
double tau_star(const DistortionParams& params);

enum class SigmaRegime { supercritical, critical, undercritical, fully_supercritical };
const char* to_string(SigmaRegime regime);

struct SigmaResult {
  double value = 0.0;
  SigmaRegime regime = SigmaRegime::supercritical;
};

// Guaranteed image dimension bound:
//   sigma(tau) = tau                              for tau >= tau_*
//   sigma(tau) = p * tau / (alpha*p - n + tau)    for 0 < tau < tau_*
// Both branches agree at tau_*. tau_* <= 0 marks the fully supercritical
// regime where sigma is the identity on all of (0, n].
SigmaResult sigma(const DistortionParams& params, double tau);

// Slice exponent mu_q = n - m + 1 - (k + alpha) * (q - m + 1),
// affine and strictly decreasing in q.
double mu_q(int n, int m, int k, double alpha, double q);

// Root of mu_q: beta_bar = m - 1 + (n - m + 1) / (k + alpha).
double beta_bar(int n, int m, int k, double alpha);

// Quasiconformal dimension distortion t' = 2Kt / (2 + (K - 1) t).
double astala_exponent(double K, double t);

}  // namespace hlab::exponents
