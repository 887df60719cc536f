#include "rwre/env_models.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "rwre/errors.hpp"
#include "rwre/special_functions.hpp"

namespace rwre {

namespace {

constexpr double kKappaSearchMax = 64.0;   // upper end of the kappa bracket
constexpr double kKappaTol = 1e-10;        // absolute bisection tolerance

bool in_unit(double x) { return x > 0.0 && x < 1.0; }

// One Gamma(shape, 1) draw, Marsaglia-Tsang squeeze method.
double sample_gamma(double shape, Stream& stream) {
  if (shape < 1.0) {
    const double u = stream.next_double_open();
    return sample_gamma(shape + 1.0, stream) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = stream.next_normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = stream.next_double_open();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace

const char* family_name(Family f) {
  switch (f) {
    case Family::two_point_known: return "two_point_known";
    case Family::two_point_free: return "two_point_free";
    case Family::beta: return "beta";
  }
  return "?";
}

Family family_from_name(const std::string& name) {
  if (name == "two_point_known") return Family::two_point_known;
  if (name == "two_point_free") return Family::two_point_free;
  if (name == "beta") return Family::beta;
  throw std::invalid_argument("unknown family: " + name);
}

int family_dim(Family f) {
  switch (f) {
    case Family::two_point_known: return 1;
    case Family::two_point_free: return 3;
    case Family::beta: return 2;
  }
  return 0;
}

double ModelFamily::order_gap() const {
  switch (kind) {
    case Family::two_point_free: return 0.05;
    case Family::beta: return 1.05;
    default: return 0.0;
  }
}

ThetaBox default_box(Family f) {
  ThetaBox b;
  switch (f) {
    case Family::two_point_known:
      b.lo = {0.01};
      b.hi = {0.99};
      break;
    case Family::two_point_free:
      b.lo = {0.05, 0.05, 0.10};
      b.hi = {0.95, 0.65, 0.95};
      break;
    case Family::beta:
      b.lo = {1.5, 0.2};
      b.hi = {12.0, 10.95};
      break;
  }
  return b;
}

EnvModel make_two_point_known(double a1, double a2, double p, std::optional<ThetaBox> box) {
  EnvModel m;
  m.family.kind = Family::two_point_known;
  m.family.a1 = a1;
  m.family.a2 = a2;
  m.family.box = box.value_or(default_box(Family::two_point_known));
  m.theta = {p};
  validate(m);
  return m;
}

EnvModel make_two_point_free(double p, double a1, double a2, std::optional<ThetaBox> box) {
  EnvModel m;
  m.family.kind = Family::two_point_free;
  m.family.box = box.value_or(default_box(Family::two_point_free));
  m.theta = {p, a1, a2};
  validate(m);
  return m;
}

EnvModel make_beta(double alpha, double beta, std::optional<ThetaBox> box) {
  EnvModel m;
  m.family.kind = Family::beta;
  m.family.box = box.value_or(default_box(Family::beta));
  m.theta = {alpha, beta};
  validate(m);
  return m;
}

EnvModel make_model(const ModelFamily& family, const SmallVec& theta) {
  EnvModel m;
  m.family = family;
  m.theta = theta;
  validate(m);
  return m;
}

void validate(const EnvModel& model) {
  const auto& f = model.family;
  const auto& th = model.theta;
  if (th.d != f.dim()) throw std::invalid_argument("theta dimension does not match family");
  switch (f.kind) {
    case Family::two_point_known:
      if (!in_unit(f.a1) || !in_unit(f.a2) || f.a1 == f.a2)
        throw std::invalid_argument("two_point_known: support points must be distinct in (0,1)");
      if (!in_unit(th[0])) throw std::invalid_argument("two_point_known: p must be in (0,1)");
      break;
    case Family::two_point_free:
      if (!in_unit(th[0])) throw std::invalid_argument("two_point_free: p must be in (0,1)");
      if (!in_unit(th[1]) || !in_unit(th[2]) || !(th[1] < th[2]))
        throw std::invalid_argument("two_point_free: requires 0 < a1 < a2 < 1");
      break;
    case Family::beta:
      if (!(th[0] > 0.0) || !(th[1] > 0.0))
        throw std::invalid_argument("beta: alpha, beta must be positive");
      if (!(th[0] > th[1] + 1.0))
        throw std::invalid_argument("beta: requires alpha > beta + 1 (ballistic region)");
      break;
  }
  if (!in_box(f, th)) throw std::invalid_argument("theta outside its box");
}

bool in_box(const ModelFamily& family, const SmallVec& theta) {
  const int d = family.dim();
  if (theta.d != d) return false;
  for (int i = 0; i < d; ++i)
    if (theta[i] < family.box.lo[i] || theta[i] > family.box.hi[i]) return false;
  if (family.kind == Family::two_point_free && theta[2] < theta[1] + family.order_gap())
    return false;
  if (family.kind == Family::beta && theta[1] > theta[0] - family.order_gap())
    return false;
  return true;
}

bool strictly_inside(const ModelFamily& family, const SmallVec& theta, double margin) {
  const int d = family.dim();
  if (theta.d != d) return false;
  for (int i = 0; i < d; ++i) {
    const double pad = margin * (family.box.hi[i] - family.box.lo[i]);
    if (theta[i] <= family.box.lo[i] + pad || theta[i] >= family.box.hi[i] - pad) return false;
  }
  if (family.kind == Family::two_point_free &&
      theta[2] <= theta[1] + family.order_gap() + margin)
    return false;
  if (family.kind == Family::beta && theta[1] >= theta[0] - family.order_gap() - margin)
    return false;
  return true;
}

SmallVec project_to_box(const ModelFamily& family, SmallVec theta) {
  const int d = family.dim();
  for (int i = 0; i < d; ++i)
    theta[i] = std::min(family.box.hi[i], std::max(family.box.lo[i], theta[i]));
  if (family.kind == Family::two_point_free) {
    // ordered box: push a2 up, then pull a1 down if the gap still fails
    const double gap = family.order_gap();
    if (theta[2] < theta[1] + gap) theta[2] = std::min(family.box.hi[2], theta[1] + gap);
    if (theta[2] < theta[1] + gap) theta[1] = theta[2] - gap;
  } else if (family.kind == Family::beta) {
    theta[1] = std::min(theta[1], theta[0] - family.order_gap());
    theta[1] = std::max(theta[1], family.box.lo[1]);
  }
  return theta;
}

double sample_omega(const EnvModel& model, Stream& stream) {
  switch (model.family.kind) {
    case Family::two_point_known:
      return stream.next_double() < model.theta[0] ? model.family.a1 : model.family.a2;
    case Family::two_point_free:
      return stream.next_double() < model.theta[0] ? model.theta[1] : model.theta[2];
    case Family::beta: {
      const double g1 = sample_gamma(model.theta[0], stream);
      const double g2 = sample_gamma(model.theta[1], stream);
      return g1 / (g1 + g2);
    }
  }
  return 0.5;
}

std::vector<double> sample_environment(const EnvModel& model, std::int64_t site_lo,
                                       std::int64_t site_hi, Stream& stream) {
  validate(model);
  if (!(site_lo <= 0 && 0 <= site_hi)) throw std::invalid_argument("need site_lo <= 0 <= site_hi");
  std::vector<double> omega(static_cast<std::size_t>(site_hi - site_lo + 1));
  for (auto& w : omega) w = sample_omega(model, stream);
  return omega;
}

double rho_moment(const EnvModel& model, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("rho_moment: s must be positive");
  const auto& th = model.theta;
  switch (model.family.kind) {
    case Family::two_point_known: {
      const double r1 = (1.0 - model.family.a1) / model.family.a1;
      const double r2 = (1.0 - model.family.a2) / model.family.a2;
      return th[0] * std::pow(r1, s) + (1.0 - th[0]) * std::pow(r2, s);
    }
    case Family::two_point_free: {
      const double r1 = (1.0 - th[1]) / th[1];
      const double r2 = (1.0 - th[2]) / th[2];
      return th[0] * std::pow(r1, s) + (1.0 - th[0]) * std::pow(r2, s);
    }
    case Family::beta: {
      // E[rho^s] = B(alpha - s, beta + s) / B(alpha, beta)
      if (s >= th[0])
        throw infinite_moment_error("rho_moment: E[rho^s] infinite for s >= alpha");
      return std::exp(sf::log_beta(th[0] - s, th[1] + s) - sf::log_beta(th[0], th[1]));
    }
  }
  return 0.0;
}

double log_rho_mean(const EnvModel& model) {
  const auto& th = model.theta;
  switch (model.family.kind) {
    case Family::two_point_known: {
      const double r1 = (1.0 - model.family.a1) / model.family.a1;
      const double r2 = (1.0 - model.family.a2) / model.family.a2;
      return th[0] * std::log(r1) + (1.0 - th[0]) * std::log(r2);
    }
    case Family::two_point_free: {
      const double r1 = (1.0 - th[1]) / th[1];
      const double r2 = (1.0 - th[2]) / th[2];
      return th[0] * std::log(r1) + (1.0 - th[0]) * std::log(r2);
    }
    case Family::beta:
      // E[log(1-omega)] - E[log omega] = psi(beta) - psi(alpha)
      return sf::digamma(th[1]) - sf::digamma(th[0]);
  }
  return 0.0;
}

RegimeReport classify_regime(const EnvModel& model) {
  validate(model);
  RegimeReport rep;
  rep.e_log_rho = log_rho_mean(model);
  try {
    rep.e_rho = rho_moment(model, 1.0);
  } catch (const infinite_moment_error&) {
    rep.e_rho = std::numeric_limits<double>::infinity();
  }
  rep.transient_right = rep.e_log_rho < 0.0;
  rep.ballistic = rep.transient_right && rep.e_rho < 1.0;
  if (rep.ballistic)
    rep.speed_limit_c = (1.0 + rep.e_rho) / (1.0 - rep.e_rho);

  if (!rep.transient_right) {
    rep.kappa = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }
  // moment(s) - 1 as a function of s, with +inf where the moment blows up
  auto f = [&](double s) {
    try {
      return rho_moment(model, s) - 1.0;
    } catch (const infinite_moment_error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  double hi = kKappaSearchMax;
  if (model.family.kind == Family::beta)
    hi = std::min(hi, model.theta[0] * (1.0 - 1e-12));  // moment finite only below alpha
  double lo = 1e-6;
  if (!(f(lo) < 0.0) || !(f(hi) > 0.0)) {
    rep.kappa = std::numeric_limits<double>::infinity();  // no sign change in bracket
    return rep;
  }
  while (hi - lo > kKappaTol) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  rep.kappa = 0.5 * (lo + hi);
  return rep;
}

}  // namespace rwre
