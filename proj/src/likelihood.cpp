#include "rwre/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rwre/special_functions.hpp"

namespace rwre {

namespace {

constexpr std::int64_t kBetaDirectSumLimit = 64;  // direct harmonic sums up to x+y = 64

void require_admissible(const ModelFamily& family, const SmallVec& theta) {
  if (theta.d != family.dim()) throw std::invalid_argument("phi: theta dimension mismatch");
  switch (family.kind) {
    case Family::two_point_known:
      if (!(theta[0] > 0.0 && theta[0] < 1.0))
        throw std::invalid_argument("phi: p must lie in (0,1)");
      break;
    case Family::two_point_free:
      if (!(theta[0] > 0.0 && theta[0] < 1.0) || !(theta[1] > 0.0) || !(theta[2] < 1.0) ||
          !(theta[1] < theta[2]))
        throw std::invalid_argument("phi: need 0 < p < 1 and 0 < a1 < a2 < 1");
      break;
    case Family::beta:
      if (!(theta[1] > 0.0) || !(theta[0] > theta[1] + 1.0))
        throw std::invalid_argument("phi: need alpha > beta + 1 > 1");
      break;
  }
}

// Context for a two-point mixture at fixed theta: atom weights and the
// posterior atom probabilities given one observed pair.
struct TwoPointCtx {
  double p, a1, a2;
  double lp, l1p, la1, l1a1, la2, l1a2;

  static TwoPointCtx make(const ModelFamily& family, const SmallVec& theta) {
    TwoPointCtx c;
    c.p = theta[0];
    if (family.kind == Family::two_point_known) {
      c.a1 = family.a1;
      c.a2 = family.a2;
    } else {
      c.a1 = theta[1];
      c.a2 = theta[2];
    }
    c.lp = std::log(c.p);
    c.l1p = std::log1p(-c.p);
    c.la1 = std::log(c.a1);
    c.l1a1 = std::log1p(-c.a1);
    c.la2 = std::log(c.a2);
    c.l1a2 = std::log1p(-c.a2);
    return c;
  }

  // phi plus posterior weights w1 = p A1 e^{-phi}, w2 = 1 - w1, computed with
  // a max shift so that huge (x, y) stay finite.
  void eval(std::int64_t x, std::int64_t y, double& phi_out, double& w1, double& w2) const {
    const double xp1 = static_cast<double>(x) + 1.0;
    const double yy = static_cast<double>(y);
    const double t1 = lp + xp1 * la1 + yy * l1a1;
    const double t2 = l1p + xp1 * la2 + yy * l1a2;
    const double m = std::max(t1, t2);
    const double e1 = std::exp(t1 - m);
    const double e2 = std::exp(t2 - m);
    phi_out = m + std::log(e1 + e2);
    w1 = e1 / (e1 + e2);
    w2 = e2 / (e1 + e2);
  }
};

// full derivative set for the two-point families
PhiDerivs two_point_derivs(const ModelFamily& family, const TwoPointCtx& c, std::int64_t x,
                           std::int64_t y) {
  PhiDerivs out;
  double w1, w2;
  c.eval(x, y, out.value, w1, w2);
  const double dp = w1 / c.p - w2 / (1.0 - c.p);

  if (family.kind == Family::two_point_known) {
    out.grad = SmallVec(1);
    out.grad[0] = dp;
    out.hess = SmallMat(1);
    out.hess.at(0, 0) = -dp * dp;
    return out;
  }

  const double xp1 = static_cast<double>(x) + 1.0;
  const double yy = static_cast<double>(y);
  const double h1 = xp1 * (1.0 - c.a1) - yy * c.a1;
  const double h2 = xp1 * (1.0 - c.a2) - yy * c.a2;
  const double da1 = w1 * h1 / (c.a1 * (1.0 - c.a1));
  const double da2 = w2 * h2 / (c.a2 * (1.0 - c.a2));

  out.grad = SmallVec(3);
  out.grad[0] = dp;
  out.grad[1] = da1;
  out.grad[2] = da2;

  // diagonal a-terms: d^2 phi = da * [ -da + x/a - (y-1)/(1-a) - (x+1+y)/h ],
  // whose factored form has a removable singularity at h = 0; there the limit
  // is -w (x+1+y)/(a(1-a)).
  auto second_a = [&](double a, double w, double da, double h) {
    const double s = xp1 + yy;  // x + 1 + y
    if (h == 0.0) return -w * s / (a * (1.0 - a));
    return da * (-da + static_cast<double>(x) / a - (yy - 1.0) / (1.0 - a) - s / h);
  };

  out.hess = SmallMat(3);
  out.hess.at(0, 0) = -dp * dp;
  out.hess.at(0, 1) = out.hess.at(1, 0) = da1 * (1.0 / c.p - dp);
  out.hess.at(0, 2) = out.hess.at(2, 0) = da2 * (-1.0 / (1.0 - c.p) - dp);
  out.hess.at(1, 2) = out.hess.at(2, 1) = -da1 * da2;
  out.hess.at(1, 1) = second_a(c.a1, w1, da1, h1);
  out.hess.at(2, 2) = second_a(c.a2, w2, da2, h2);
  return out;
}

// Harmonic sums for the Beta family:
//   head(c, m)  = sum_{k=0}^{m-1} 1/(k+c)   and its squared counterpart.
// Direct summation for short ranges, digamma/trigamma differences beyond.
double harmonic(double c, std::int64_t m, bool direct) {
  if (m <= 0) return 0.0;
  if (direct) {
    double s = 0.0;
    for (std::int64_t k = m - 1; k >= 0; --k) s += 1.0 / (static_cast<double>(k) + c);
    return s;
  }
  return sf::digamma(c + static_cast<double>(m)) - sf::digamma(c);
}

double harmonic2(double c, std::int64_t m, bool direct) {
  if (m <= 0) return 0.0;
  if (direct) {
    double s = 0.0;
    for (std::int64_t k = m - 1; k >= 0; --k) {
      const double t = static_cast<double>(k) + c;
      s += 1.0 / (t * t);
    }
    return s;
  }
  return sf::trigamma(c) - sf::trigamma(c + static_cast<double>(m));
}

PhiDerivs beta_derivs(const SmallVec& theta, std::int64_t x, std::int64_t y) {
  const double alpha = theta[0], beta = theta[1];
  const double xd = static_cast<double>(x), yd = static_cast<double>(y);
  PhiDerivs out;
  out.value = sf::log_gamma(xd + 1.0 + alpha) + sf::log_gamma(yd + beta) -
              sf::log_gamma(xd + 1.0 + alpha + yd + beta) - sf::log_gamma(alpha) -
              sf::log_gamma(beta) + sf::log_gamma(alpha + beta);

  const bool direct = x + y <= kBetaDirectSumLimit;
  const double sx = harmonic(alpha, x + 1, direct);
  const double sy = harmonic(beta, y, direct);
  const double sxy = harmonic(alpha + beta, x + y + 1, direct);
  out.grad = SmallVec(2);
  out.grad[0] = sx - sxy;
  out.grad[1] = sy - sxy;

  const double tx = harmonic2(alpha, x + 1, direct);
  const double ty = harmonic2(beta, y, direct);
  const double txy = harmonic2(alpha + beta, x + y + 1, direct);
  out.hess = SmallMat(2);
  out.hess.at(0, 0) = -tx + txy;
  out.hess.at(1, 1) = -ty + txy;
  out.hess.at(0, 1) = out.hess.at(1, 0) = txy;
  return out;
}

}  // namespace

PhiDerivs phi_derivs(const ModelFamily& family, const SmallVec& theta, std::int64_t x,
                     std::int64_t y) {
  require_admissible(family, theta);
  if (x < 0 || y < 0) throw std::invalid_argument("phi: x, y must be nonnegative");
  if (family.kind == Family::beta) return beta_derivs(theta, x, y);
  return two_point_derivs(family, TwoPointCtx::make(family, theta), x, y);
}

double phi(const ModelFamily& family, const SmallVec& theta, std::int64_t x, std::int64_t y) {
  require_admissible(family, theta);
  if (x < 0 || y < 0) throw std::invalid_argument("phi: x, y must be nonnegative");
  if (family.kind == Family::beta) {
    const double alpha = theta[0], beta = theta[1];
    const double xd = static_cast<double>(x), yd = static_cast<double>(y);
    return sf::log_gamma(xd + 1.0 + alpha) + sf::log_gamma(yd + beta) -
           sf::log_gamma(xd + 1.0 + alpha + yd + beta) - sf::log_gamma(alpha) -
           sf::log_gamma(beta) + sf::log_gamma(alpha + beta);
  }
  const auto c = TwoPointCtx::make(family, theta);
  double value, w1, w2;
  c.eval(x, y, value, w1, w2);
  return value;
}

SmallVec grad_phi(const ModelFamily& family, const SmallVec& theta, std::int64_t x,
                  std::int64_t y) {
  return phi_derivs(family, theta, x, y).grad;
}

SmallMat hess_phi(const ModelFamily& family, const SmallVec& theta, std::int64_t x,
                  std::int64_t y) {
  return phi_derivs(family, theta, x, y).hess;
}

double phi_beta_sum(double alpha, double beta, std::int64_t x, std::int64_t y) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw std::invalid_argument("phi_beta_sum: bad theta");
  double s = 0.0;
  for (std::int64_t k = 0; k <= x; ++k) s += std::log(static_cast<double>(k) + alpha);
  for (std::int64_t k = 0; k < y; ++k) s += std::log(static_cast<double>(k) + beta);
  for (std::int64_t k = 0; k <= x + y; ++k) s -= std::log(static_cast<double>(k) + alpha + beta);
  return s;
}

PairCounts compress_pairs(std::span<const std::int64_t> left_stats) {
  if (left_stats.size() < 2) throw std::invalid_argument("left stats need at least two sites");
  PairCounts pc;
  pc.n = static_cast<std::int64_t>(left_stats.size()) - 1;
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
  pairs.reserve(static_cast<std::size_t>(pc.n));
  for (std::size_t x = 0; x + 1 < left_stats.size(); ++x) {
    if (left_stats[x] < 0 || left_stats[x + 1] < 0)
      throw std::invalid_argument("left stats must be nonnegative");
    pairs.emplace_back(left_stats[x + 1], left_stats[x]);
  }
  std::sort(pairs.begin(), pairs.end());
  for (std::size_t i = 0; i < pairs.size();) {
    std::size_t j = i;
    while (j < pairs.size() && pairs[j] == pairs[i]) ++j;
    pc.items.push_back({pairs[i], static_cast<std::int64_t>(j - i)});
    i = j;
  }
  return pc;
}

LikelihoodEval criterion(const ModelFamily& family, const SmallVec& theta,
                         std::span<const std::int64_t> left_stats) {
  require_admissible(family, theta);
  if (left_stats.size() < 2) throw std::invalid_argument("left stats need at least two sites");
  const int d = family.dim();
  LikelihoodEval ev;
  ev.n = static_cast<std::int64_t>(left_stats.size()) - 1;
  ev.gradient = SmallVec(d);
  ev.hessian = SmallMat(d);
  double comp = 0.0;  // Kahan compensation for the value
  for (std::size_t x = 0; x + 1 < left_stats.size(); ++x) {
    const PhiDerivs pd = phi_derivs(family, theta, left_stats[x + 1], left_stats[x]);
    const double y = pd.value - comp;
    const double t = ev.value + y;
    comp = (t - ev.value) - y;
    ev.value = t;
    for (int i = 0; i < d; ++i) ev.gradient[i] += pd.grad[i];
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) ev.hessian.at(i, j) += pd.hess.at(i, j);
  }
  return ev;
}

LikelihoodEval criterion(const ModelFamily& family, const SmallVec& theta,
                         const PairCounts& counts) {
  require_admissible(family, theta);
  const int d = family.dim();
  LikelihoodEval ev;
  ev.n = counts.n;
  ev.gradient = SmallVec(d);
  ev.hessian = SmallMat(d);
  double comp = 0.0;
  for (const auto& [pair, mult] : counts.items) {
    const PhiDerivs pd = phi_derivs(family, theta, pair.first, pair.second);
    const double w = static_cast<double>(mult);
    const double y = w * pd.value - comp;
    const double t = ev.value + y;
    comp = (t - ev.value) - y;
    ev.value = t;
    for (int i = 0; i < d; ++i) ev.gradient[i] += w * pd.grad[i];
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) ev.hessian.at(i, j) += w * pd.hess.at(i, j);
  }
  return ev;
}

}  // namespace rwre
