#include <cmath>

#include "doctest.h"

#include "hlab/errors.hpp"
#include "hlab/exponents.hpp"
#include "hlab/rng.hpp"

using namespace hlab;
using namespace hlab::exponents;

TEST_CASE("tau_star evaluates n - (alpha-1)p") {
  CHECK(tau_star({4, 2.0, 3.0}) == 1.0);
  CHECK(tau_star({1, 1.0, 2.0}) == 1.0);  // alpha = 1 forces tau_star = n
  CHECK(tau_star({4, 3.0, 3.0}) == -2.0);
}

TEST_CASE("parameter validation rejects out-of-range fields") {
  CHECK_THROWS_AS(tau_star({4, 2.0, 1.0}), DomainError);   // p must exceed 1
  CHECK_THROWS_AS(tau_star({4, 0.0, 3.0}), DomainError);   // alpha must be positive
  CHECK_THROWS_AS(tau_star({0, 2.0, 3.0}), DomainError);   // n must be at least 1
  CHECK_THROWS_AS(sigma({4, 2.0, 3.0}, 0.0), DomainError); // tau in (0, n]
  CHECK_THROWS_AS(sigma({4, 2.0, 3.0}, 4.5), DomainError);
  CHECK_THROWS_AS(sigma({4, 2.0, 3.0}, -1.0), DomainError);
}

TEST_CASE("sigma branches and the critical point") {
  const DistortionParams params{4, 2.0, 3.0};
  SUBCASE("identity branch above the critical dimension") {
    const auto res = sigma(params, 2.0);
    CHECK(res.value == 2.0);
    CHECK(res.regime == SigmaRegime::supercritical);
  }
  SUBCASE("rational branch below the critical dimension") {
    const auto res = sigma(params, 0.5);
    CHECK(res.value == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(res.regime == SigmaRegime::undercritical);
  }
  SUBCASE("branches agree at the critical dimension") {
    const double ts = tau_star(params);
    const auto res = sigma(params, ts);
    CHECK(res.value == ts);
    CHECK(res.regime == SigmaRegime::critical);
    CHECK(params.p * ts / (params.alpha * params.p - params.n + ts) == ts);
  }
  SUBCASE("continuity across the critical dimension") {
    const double ts = tau_star(params);
    for (double eps = 1e-2; eps >= 1e-8; eps /= 10.0) {
      const double gap = std::fabs(sigma(params, ts - eps).value - sigma(params, ts + eps).value);
      CHECK(gap <= 10.0 * eps);
    }
  }
}

TEST_CASE("sigma dominates tau, with equality exactly above the critical dimension") {
  const DistortionParams params{4, 2.0, 3.0};
  const double ts = tau_star(params);
  for (int i = 1; i <= 1000; ++i) {
    const double tau = 4.0 * i / 1000.0;
    const auto res = sigma(params, tau);
    CHECK(res.value >= tau);
    if (tau > ts + 1e-9) CHECK(res.value == tau);
    if (tau < ts - 1e-9) CHECK(res.value > tau);
  }
}

TEST_CASE("sigma is nondecreasing in tau") {
  Rng rng = seeded_rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = static_cast<int>(uniform_int(rng, 1, 4));
    const double p = uniform(rng, 1.1, 4.0);
    const double lo = n / p + 0.05;  // keep alpha*p > n
    const double alpha = uniform(rng, lo, lo + 2.0);
    const DistortionParams params{n, alpha, p};
    double prev = 0.0;
    for (int i = 1; i <= 500; ++i) {
      const double tau = n * static_cast<double>(i) / 500.0;
      const double val = sigma(params, tau).value;
      CHECK(val >= prev - 1e-12);
      prev = val;
    }
  }
}

TEST_CASE("fully supercritical parameters make sigma the identity") {
  const DistortionParams params{1, 2.0, 3.0};  // tau_star = -2
  CHECK(tau_star(params) == -2.0);
  for (double tau : {0.1, 0.5, 1.0}) {
    const auto res = sigma(params, tau);
    CHECK(res.value == tau);
    CHECK(res.regime == SigmaRegime::fully_supercritical);
  }
}

TEST_CASE("subcritical integrability is a regime error, lorentz mode admits the borderline") {
  CHECK_THROWS_AS(sigma({1, 0.5, 1.5}, 0.5), RegimeError);  // alpha*p = 0.75 < 1
  CHECK_THROWS_AS(sigma({2, 1.0, 2.0}, 1.0), RegimeError);  // alpha*p == n, strict mode
  const DistortionParams borderline{2, 1.0, 2.0, {}, {}, true};
  CHECK(sigma(borderline, 1.0).value >= 1.0);
}

TEST_CASE("slice exponent identities") {
  // q = m: the first-derivative count drops out.
  CHECK(mu_q(4, 1, 2, 0.0, 1.0) == 2.0);  // n-m-k+1
  CHECK(mu_q(3, 2, 1, 0.5, 2.0) == doctest::Approx(3.0 - 2.0 - 1.0 - 0.5 + 1.0).epsilon(1e-15));
  Rng rng = seeded_rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = static_cast<int>(uniform_int(rng, 1, 6));
    const int m = static_cast<int>(uniform_int(rng, 1, n));
    const int k = static_cast<int>(uniform_int(rng, 1, 4));
    const double alpha = uniform(rng, 0.0, 0.999);
    // The affine normal form pins the intercept at q -> m-1.
    const double q = m - 1.0 + uniform(rng, 0.01, 3.0);
    const double reconstructed = mu_q(n, m, k, alpha, q) + (k + alpha) * (q - m + 1.0);
    CHECK(reconstructed == doctest::Approx(n - m + 1.0).epsilon(1e-12));
    // q = beta_bar is the root.
    const double bb = beta_bar(n, m, k, alpha);
    CHECK(std::fabs(mu_q(n, m, k, alpha, bb)) <= 1e-12);
    CHECK(bb > m - 1.0);
  }
}

TEST_CASE("slice exponent is affine and strictly decreasing in q") {
  const double d1 = mu_q(4, 2, 2, 0.5, 1.5) - mu_q(4, 2, 2, 0.5, 2.5);
  const double d2 = mu_q(4, 2, 2, 0.5, 2.5) - mu_q(4, 2, 2, 0.5, 3.5);
  CHECK(d1 == doctest::Approx(2.5).epsilon(1e-15));  // slope -(k+alpha)
  CHECK(d1 == doctest::Approx(d2).epsilon(1e-15));
  CHECK(mu_q(4, 2, 2, 0.5, 2.0) > mu_q(4, 2, 2, 0.5, 2.0001));
}

TEST_CASE("slice exponent domain errors") {
  CHECK_THROWS_AS(mu_q(4, 5, 2, 0.5, 5.0), DomainError);  // m > n
  CHECK_THROWS_AS(mu_q(4, 2, 2, 0.5, 1.0), DomainError);  // q <= m-1
  CHECK_THROWS_AS(mu_q(4, 2, 0, 0.5, 2.0), DomainError);  // k >= 1
  CHECK_THROWS_AS(mu_q(4, 2, 2, 1.0, 2.0), DomainError);  // alpha in [0,1)
  CHECK_THROWS_AS(beta_bar(4, 2, 0, 0.5), DomainError);
}

TEST_CASE("beta_bar closed forms") {
  CHECK(beta_bar(4, 1, 2, 0.0) == 2.0);
  for (int n = 1; n <= 5; ++n) CHECK(beta_bar(n, n, 1, 0.0) == static_cast<double>(n));
}

TEST_CASE("quasiconformal distortion exponent") {
  CHECK(astala_exponent(1.0, 0.7) == 0.7);
  CHECK(astala_exponent(3.0, 1.0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(astala_exponent(5.0, 1e-9) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(std::fabs(astala_exponent(4.0, 2.0 - 1e-9) - 2.0) < 1e-6);
  CHECK_THROWS_AS(astala_exponent(0.5, 1.0), DomainError);
  CHECK_THROWS_AS(astala_exponent(2.0, 0.0), DomainError);
  CHECK_THROWS_AS(astala_exponent(2.0, 2.0), DomainError);
  // Monotone in both arguments, value always inside (0, 2).
  double prev = 0.0;
  for (double t = 0.1; t < 2.0; t += 0.1) {
    const double cur = astala_exponent(2.0, t);
    CHECK(cur > prev);
    CHECK(cur < 2.0);
    prev = cur;
  }
  prev = 0.0;
  for (double K = 1.0; K <= 10.0; K += 0.5) {
    const double cur = astala_exponent(K, 1.0);
    CHECK(cur >= prev);
    prev = cur;
  }
}
