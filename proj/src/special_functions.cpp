#include "rwre/special_functions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rwre::sf {

namespace {

// Lanczos coefficients, g = 7, n = 9 (Godfrey's values).
constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,     -176.61502916214059,    12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // log(2*pi)/2

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("log_gamma: requires x > 0");
  // push small arguments up for accuracy: Gamma(x) = Gamma(x+1)/x
  double shift = 0.0;
  while (x < 0.5) {
    shift -= std::log(x);
    x += 1.0;
  }
  const double z = x - 1.0;
  double series = kLanczos[0];
  for (int i = 1; i < 9; ++i) series += kLanczos[i] / (z + i);
  const double t = z + kLanczosG + 0.5;
  return shift + kHalfLog2Pi + (z + 0.5) * std::log(t) - t + std::log(series);
}

double log_beta(double a, double b) {
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

double digamma(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("digamma: requires x > 0");
  double acc = 0.0;
  while (x < 10.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  // psi(x) ~ ln x - 1/(2x) - sum B_{2n}/(2n x^{2n})
  const double r = 1.0 / (x * x);
  const double tail = r * (1.0 / 12.0 -
                      r * (1.0 / 120.0 -
                      r * (1.0 / 252.0 -
                      r * (1.0 / 240.0 -
                      r * (1.0 / 132.0 -
                      r * (691.0 / 32760.0 -
                      r * (1.0 / 12.0)))))));
  return acc + std::log(x) - 0.5 / x - tail;
}

double trigamma(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("trigamma: requires x > 0");
  double acc = 0.0;
  while (x < 10.0) {
    acc += 1.0 / (x * x);
    x += 1.0;
  }
  // psi'(x) ~ 1/x + 1/(2x^2) + sum B_{2n}/x^{2n+1}
  const double r = 1.0 / (x * x);
  const double tail = 1.0 / 6.0 -
                 r * (1.0 / 30.0 -
                 r * (1.0 / 42.0 -
                 r * (1.0 / 30.0 -
                 r * (5.0 / 66.0 -
                 r * (691.0 / 2730.0 -
                 r * (7.0 / 6.0))))));
  return acc + 1.0 / x + 0.5 * r + tail * r / x;
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.70710678118654752440);
}

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("normal_quantile: u in (0,1)");
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (normal_cdf(mid) < u)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-14) break;
  }
  return 0.5 * (lo + hi);
}

double reg_lower_gamma(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("reg_lower_gamma: bad arguments");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) {
    // series:  P(a,x) = x^a e^-x / Gamma(a) * sum_n x^n / (a (a+1) ... (a+n))
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int n = 0; n < 500; ++n) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
  }
  // Lentz continued fraction for Q(a,x)
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  const double q = std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
  return 1.0 - q;
}

double chi2_cdf(double x, int dof) {
  if (dof < 1) throw std::invalid_argument("chi2_cdf: dof >= 1");
  if (x <= 0.0) return 0.0;
  return reg_lower_gamma(0.5 * dof, 0.5 * x);
}

double chi2_quantile(double u, int dof) {
  if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("chi2_quantile: u in (0,1)");
  double lo = 0.0, hi = 1.0;
  while (chi2_cdf(hi, dof) < u) hi *= 2.0;  // bracket
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (chi2_cdf(mid, dof) < u)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-13 * (1.0 + hi)) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace rwre::sf
