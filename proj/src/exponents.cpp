#include "hlab/exponents.hpp"

#include <cmath>
#include <string>

#include "hlab/errors.hpp"

namespace hlab::exponents {

void DistortionParams::validate() const {
  if (n < 1) throw DomainError("n must be a positive integer, got " + std::to_string(n));
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw DomainError("alpha must be positive and finite");
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("p must satisfy p > 1");
  if (k && *k < 1) throw DomainError("k must satisfy k >= 1");
  if (m && (*m < 1 || *m > n)) throw DomainError("m must satisfy 1 <= m <= n");
}

void DistortionParams::require_supercritical() const {
  validate();
  const double ap = alpha * p;
  if (lorentz_mode) {
    if (ap < static_cast<double>(n))
      throw RegimeError("hypothesis alpha*p >= n fails: alpha*p = " + std::to_string(ap) +
                        ", n = " + std::to_string(n));
  } else if (ap <= static_cast<double>(n)) {
    throw RegimeError("hypothesis alpha*p > n fails: alpha*p = " + std::to_string(ap) +
                      ", n = " + std::to_string(n));
  }
}

double tau_star(const DistortionParams& params) {
  params.validate();
  return static_cast<double>(params.n) - (params.alpha - 1.0) * params.p;
}

const char* to_string(SigmaRegime regime) {
  switch (regime) {
    case SigmaRegime::supercritical: return "supercritical";
    case SigmaRegime::critical: return "critical";
    case SigmaRegime::undercritical: return "undercritical";
    case SigmaRegime::fully_supercritical: return "fully_supercritical";
  }
  return "unknown";
}

SigmaResult sigma(const DistortionParams& params, double tau) {
  params.require_supercritical();
  const double n = static_cast<double>(params.n);
  if (!(tau > 0.0) || tau > n || !std::isfinite(tau))
    throw DomainError("tau must lie in (0, n], got " + std::to_string(tau));

  const double ts = tau_star(params);
  if (ts <= 0.0) {
    // Every admissible tau exceeds tau_*: sigma is the identity.
    return {tau, SigmaRegime::fully_supercritical};
  }
  const double tol = 1e-12 * std::max(1.0, std::fabs(ts));
  if (std::fabs(tau - ts) <= tol) {
    // Both branches take the common value tau_* here.
    return {ts, SigmaRegime::critical};
  }
  if (tau > ts) return {tau, SigmaRegime::supercritical};
  return {params.p * tau / (params.alpha * params.p - n + tau), SigmaRegime::undercritical};
}

double mu_q(int n, int m, int k, double alpha, double q) {
  if (n < 1) throw DomainError("n must be a positive integer");
  if (m < 1 || m > n) throw DomainError("m must satisfy 1 <= m <= n");
  if (k < 1) throw DomainError("k must satisfy k >= 1");
  if (alpha < 0.0 || alpha >= 1.0) throw DomainError("alpha must lie in [0, 1)");
  const double md = static_cast<double>(m);
  if (!(q > md - 1.0)) throw DomainError("q must satisfy q > m - 1");
  return static_cast<double>(n) - md + 1.0 - (static_cast<double>(k) + alpha) * (q - md + 1.0);
}

double beta_bar(int n, int m, int k, double alpha) {
  if (n < 1) throw DomainError("n must be a positive integer");
  if (m < 1 || m > n) throw DomainError("m must satisfy 1 <= m <= n");
  if (k < 1) throw DomainError("k must satisfy k >= 1");
  if (alpha < 0.0 || alpha >= 1.0) throw DomainError("alpha must lie in [0, 1)");
  const double ka = static_cast<double>(k) + alpha;
  if (ka <= 0.0) throw DomainError("k + alpha must be positive");
  return static_cast<double>(m) - 1.0 + (static_cast<double>(n - m) + 1.0) / ka;
}

double astala_exponent(double K, double t) {
  if (!(K >= 1.0) || !std::isfinite(K)) throw DomainError("K must satisfy K >= 1");
  if (!(t > 0.0) || !(t < 2.0)) throw DomainError("t must lie in (0, 2)");
  return 2.0 * K * t / (2.0 + (K - 1.0) * t);
}

}  // namespace hlab::exponents
