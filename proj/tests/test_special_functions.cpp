#include "doctest.h"

#include <cmath>

#include "rwre/special_functions.hpp"

namespace sf = rwre::sf;

namespace {

// Acklam's rational approximation of the normal quantile (|rel err| < 1.2e-9),
// kept here purely as an independent oracle for the bisection implementation.
double acklam_quantile(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1 - plow;
  double q, r;
  if (p < plow) {
    q = std::sqrt(-2 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  if (p <= phigh) {
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  }
  q = std::sqrt(-2 * std::log(1 - p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
}

}  // namespace

TEST_CASE("log_gamma agrees with the libm implementation") {
  const double xs[] = {0.2, 0.5, 1.0, 1.5, 2.5, 5.0, 6.5, 10.3, 57.0, 100.0, 1000.5};
  for (const double x : xs)
    CHECK(sf::log_gamma(x) ==
          doctest::Approx(std::lgamma(x)).epsilon(1e-12).scale(std::max(1.0, std::fabs(std::lgamma(x)))));
}

TEST_CASE("digamma: known values, recurrence, derivative of log_gamma") {
  CHECK(sf::digamma(1.0) == doctest::Approx(-0.57721566490153286).epsilon(1e-12));
  CHECK(sf::digamma(0.5) == doctest::Approx(-1.9635100260214235).epsilon(1e-12));
  for (double x = 0.25; x < 30.0; x += 0.731) {
    CHECK(sf::digamma(x + 1.0) - sf::digamma(x) == doctest::Approx(1.0 / x).epsilon(1e-11));
    const double h = 1e-6;
    const double fd = (sf::log_gamma(x + h) - sf::log_gamma(x - h)) / (2 * h);
    CHECK(sf::digamma(x) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("trigamma: known value, recurrence, derivative of digamma") {
  CHECK(sf::trigamma(1.0) == doctest::Approx(1.6449340668482264).epsilon(1e-12));
  for (double x = 0.25; x < 30.0; x += 0.731) {
    CHECK(sf::trigamma(x) - sf::trigamma(x + 1.0) ==
          doctest::Approx(1.0 / (x * x)).epsilon(1e-11));
    const double h = 1e-6;
    const double fd = (sf::digamma(x + h) - sf::digamma(x - h)) / (2 * h);
    CHECK(sf::trigamma(x) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("beta-function ratio identity") {
  // B(alpha-1, beta+1)/B(alpha, beta) = beta/(alpha-1)
  for (double alpha = 2.0; alpha <= 10.0; alpha += 0.5)
    for (double beta = 0.5; beta <= 3.0; beta += 0.25) {
      const double lhs = std::exp(sf::log_beta(alpha - 1.0, beta + 1.0) -
                                  sf::log_beta(alpha, beta));
      CHECK(lhs == doctest::Approx(beta / (alpha - 1.0)).epsilon(1e-12));
    }
}

TEST_CASE("normal quantile: frozen value, oracle agreement, round trip") {
  CHECK(sf::normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-10));
  CHECK(sf::normal_quantile(0.995) == doctest::Approx(2.5758293035489004).epsilon(1e-10));
  const double levels[] = {0.9, 0.95, 0.975, 0.99, 0.995};
  for (const double u : levels) {
    CHECK(std::fabs(sf::normal_quantile(u) - acklam_quantile(u)) < 1e-8);
    CHECK(std::fabs(sf::normal_cdf(sf::normal_quantile(u)) - u) < 1e-10);
  }
}

TEST_CASE("chi-square quantiles: frozen values, closed form at dof 2, round trip") {
  CHECK(sf::chi2_quantile(0.95, 1) == doctest::Approx(3.841458820694124).epsilon(1e-9));
  CHECK(sf::chi2_quantile(0.95, 2) == doctest::Approx(5.991464547107979).epsilon(1e-9));
  CHECK(sf::chi2_quantile(0.95, 3) == doctest::Approx(7.814727903251179).epsilon(1e-9));
  CHECK(sf::chi2_quantile(0.99, 3) == doctest::Approx(11.344866730144373).epsilon(1e-9));
  const double levels[] = {0.9, 0.95, 0.975, 0.99, 0.995};
  for (const double u : levels) {
    // dof 2 closed form: F(x) = 1 - exp(-x/2)
    CHECK(sf::chi2_quantile(u, 2) == doctest::Approx(-2.0 * std::log(1.0 - u)).epsilon(1e-10));
    for (int d = 1; d <= 3; ++d)
      CHECK(std::fabs(sf::chi2_cdf(sf::chi2_quantile(u, d), d) - u) < 1e-10);
  }
}
