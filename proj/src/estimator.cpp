#include "rwre/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rwre/special_functions.hpp"

namespace rwre {

namespace {

constexpr double kArmijoSlope = 1e-4;
constexpr double kGolden = 0.61803398874989484820;

struct Candidate {
  SmallVec theta;
  double value = -std::numeric_limits<double>::infinity();
  double grad_norm = std::numeric_limits<double>::infinity();
  bool interior = false;
  bool stationary = false;
  bool on_boundary = false;
};

// ranking per the tie-break rule: value, then gradient norm, then theta
bool better(const Candidate& a, const Candidate& b) {
  if (a.value != b.value) return a.value > b.value;
  if (a.grad_norm != b.grad_norm) return a.grad_norm < b.grad_norm;
  return lex_less(a.theta, b.theta);
}

// Low-discrepancy start points: additive recurrence with the generalized
// golden ratios, offset drawn once from the caller's stream.
std::vector<SmallVec> make_starts(const ModelFamily& family, Stream& stream, int count) {
  const int d = family.dim();
  // plastic-constant fractions per dimension
  double g = 1.0;
  for (int it = 0; it < 40; ++it) g = std::pow(1.0 + g, 1.0 / (d + 1));
  SmallVec alpha(d), u(d);
  for (int i = 0; i < d; ++i) {
    alpha[i] = std::fmod(std::pow(1.0 / g, i + 1), 1.0);
    u[i] = stream.next_double();
  }
  std::vector<SmallVec> starts;
  SmallVec center(d);
  for (int i = 0; i < d; ++i)
    center[i] = 0.5 * (family.box.lo[i] + family.box.hi[i]);
  starts.push_back(project_to_box(family, center));
  for (int k = 1; k < count; ++k) {
    SmallVec t(d);
    for (int i = 0; i < d; ++i) {
      u[i] = std::fmod(u[i] + alpha[i], 1.0);
      t[i] = family.box.lo[i] + u[i] * (family.box.hi[i] - family.box.lo[i]);
    }
    starts.push_back(project_to_box(family, t));
  }
  return starts;
}

// Newton ascent from one start; classifies the terminal point.
Candidate newton_from(const ModelFamily& family, const PairCounts& counts, SmallVec theta,
                      const MleOptions& opt) {
  const int d = family.dim();
  const double grad_tol = opt.grad_tol_factor * static_cast<double>(counts.n);
  Candidate cand;
  LikelihoodEval ev = criterion(family, theta, counts);

  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    if (ev.gradient.norm_inf() <= grad_tol &&
        strictly_inside(family, theta, opt.interior_margin))
      break;

    // modified Newton direction: make -hessian positive definite by shifting
    SmallMat h(d);
    double max_diag = 0.0;
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) h.at(i, j) = -ev.hessian.at(i, j);
      max_diag = std::max(max_diag, std::fabs(h.at(i, i)));
    }
    double shift = 0.0;
    SmallVec dir(d);
    for (int tries = 0; tries < 60; ++tries) {
      SmallMat shifted = h;
      for (int i = 0; i < d; ++i) shifted.at(i, i) += shift;
      if (solve_spd(shifted, ev.gradient, dir)) break;
      shift = shift == 0.0 ? std::max(1e-10, 1e-8 * max_diag) : shift * 10.0;
      dir = SmallVec(d);
    }

    // projected backtracking line search (Armijo on the projected point)
    double t = 1.0;
    bool moved = false;
    while (t >= 1e-14) {
      SmallVec trial = project_to_box(family, theta + t * dir);
      const SmallVec step = trial - theta;
      if (step.norm_inf() > 0.0) {
        LikelihoodEval trial_ev = criterion(family, trial, counts);
        if (trial_ev.value >= ev.value + kArmijoSlope * dot(ev.gradient, step)) {
          moved = step.norm_inf() >= opt.step_tol;
          theta = trial;
          ev = std::move(trial_ev);
          break;
        }
      }
      t *= 0.5;
    }
    if (!moved) break;  // stagnated or parked on a face
  }

  cand.theta = theta;
  cand.value = ev.value;
  cand.grad_norm = ev.gradient.norm_inf();
  cand.interior = strictly_inside(family, theta, opt.interior_margin);
  cand.stationary = cand.interior && cand.grad_norm <= grad_tol;
  cand.on_boundary = !cand.interior;
  return cand;
}

// One-dimensional path: golden-section bracket over the box followed by a
// Newton polish.
Candidate golden_newton(const ModelFamily& family, const PairCounts& counts,
                        const MleOptions& opt) {
  const double lo = family.box.lo[0], hi = family.box.hi[0];
  const double grad_tol = opt.grad_tol_factor * static_cast<double>(counts.n);
  auto value_at = [&](double p) {
    SmallVec th{p};
    return criterion(family, th, counts).value;
  };

  double a = lo, b = hi;
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = value_at(x1), f2 = value_at(x2);
  while (b - a > 1e-12 * (hi - lo)) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = value_at(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = value_at(x1);
    }
  }
  double p = 0.5 * (a + b);

  // Newton polish toward a stationary interior point
  for (int iter = 0; iter < 60; ++iter) {
    SmallVec th{p};
    const LikelihoodEval ev = criterion(family, th, counts);
    if (std::fabs(ev.gradient[0]) <= grad_tol) break;
    const double curv = -ev.hessian.at(0, 0);
    if (!(curv > 0.0)) break;
    double step = ev.gradient[0] / curv;
    const double span = hi - lo;
    step = std::clamp(step, -0.25 * span, 0.25 * span);
    const double next = std::clamp(p + step, lo, hi);
    if (std::fabs(next - p) < opt.step_tol) {
      p = next;
      break;
    }
    p = next;
  }

  Candidate cand;
  cand.theta = SmallVec{p};
  const LikelihoodEval ev = criterion(family, cand.theta, counts);
  cand.value = ev.value;
  cand.grad_norm = std::fabs(ev.gradient[0]);
  cand.interior = strictly_inside(family, cand.theta, opt.interior_margin);
  cand.stationary = cand.interior && cand.grad_norm <= grad_tol;
  cand.on_boundary = !cand.interior;
  return cand;
}

}  // namespace

const char* opt_status_name(OptStatus s) {
  switch (s) {
    case OptStatus::converged: return "converged";
    case OptStatus::boundary: return "boundary";
    case OptStatus::failed: return "failed";
  }
  return "?";
}

EstimateReport mle(const ModelFamily& family, const PairCounts& counts, Stream& stream,
                   const MleOptions& options) {
  const int d = family.dim();
  std::vector<Candidate> cands;
  if (d == 1) {
    cands.push_back(golden_newton(family, counts, options));
  } else {
    for (const SmallVec& start : make_starts(family, stream, options.starts))
      cands.push_back(newton_from(family, counts, start, options));
  }

  // prefer interior stationary points; otherwise best overall
  const Candidate* best = nullptr;
  for (const auto& c : cands)
    if (c.stationary && (best == nullptr || better(c, *best))) best = &c;
  const bool have_stationary = best != nullptr;
  if (!have_stationary)
    for (const auto& c : cands)
      if (best == nullptr || better(c, *best)) best = &c;

  EstimateReport rep;
  rep.theta_hat = best->theta;
  rep.n = counts.n;
  rep.grad_norm = best->grad_norm;
  rep.value = best->value;
  if (have_stationary) {
    rep.status = OptStatus::converged;
  } else {
    bool all_boundary = true;
    for (const auto& c : cands) all_boundary = all_boundary && c.on_boundary;
    rep.status = all_boundary ? OptStatus::boundary
                              : (best->on_boundary ? OptStatus::boundary : OptStatus::failed);
  }
  rep.sigma_hat = observed_fisher(family, rep.theta_hat, counts);
  return rep;
}

EstimateReport mle(const ModelFamily& family, std::span<const std::int64_t> left_stats,
                   Stream& stream, const MleOptions& options) {
  return mle(family, compress_pairs(left_stats), stream, options);
}

SmallMat observed_fisher(const ModelFamily& family, const SmallVec& theta_hat,
                         const PairCounts& counts) {
  const LikelihoodEval ev = criterion(family, theta_hat, counts);
  SmallMat sigma = (-1.0 / static_cast<double>(counts.n)) * ev.hessian;
  sigma.symmetrize();
  return sigma;
}

bool covers(const Region& region, const SmallVec& theta_star) {
  if (!region.available) return false;
  const SmallVec diff = region.center - theta_star;
  return region.n * quad_form(region.sigma, diff) <= region.threshold;
}

Region confidence_region(const EstimateReport& report, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("confidence_region: gamma in (0,1)");
  Region region;
  region.d = report.theta_hat.d;
  region.n = static_cast<double>(report.n);
  region.gamma = gamma;
  region.center = report.theta_hat;
  region.sigma = report.sigma_hat;
  region.threshold = sf::chi2_quantile(1.0 - gamma, region.d);
  if (report.status != OptStatus::converged || !is_positive_definite(report.sigma_hat)) {
    region.available = false;  // counted as a failed replicate downstream
    return region;
  }
  region.available = true;
  if (region.d == 1)
    region.half_width =
        sf::normal_quantile(1.0 - gamma / 2.0) / std::sqrt(region.n * region.sigma.at(0, 0));
  return region;
}

double temkin_speed(double p, double a) {
  return (a + p - 2.0 * a * p) / ((2.0 * a - 1.0) * (p - a));
}

double temkin_naive(double t_n, double n, double a) {
  if (!(a > 0.5 && a < 1.0)) throw std::invalid_argument("temkin_naive: a in (1/2,1)");
  if (!(t_n >= n) || !(n > 0)) throw std::invalid_argument("temkin_naive: need T_n >= n >= 1");
  return a / (2.0 * a - 1.0) * ((2.0 * a - 1.0) * t_n + n) / (t_n + n);
}

SmallMat moment_derivative_matrix(double p, double a1, double a2) {
  // rows: d/dp, d/da1, d/da2 of E[omega^{k+1}]; columns k = 0,1,2
  SmallMat m(3);
  for (int k = 0; k < 3; ++k) {
    const double e = static_cast<double>(k) + 1.0;
    m.at(0, k) = std::pow(a1, e) - std::pow(a2, e);
    m.at(1, k) = p * e * std::pow(a1, e - 1.0);
    m.at(2, k) = (1.0 - p) * e * std::pow(a2, e - 1.0);
  }
  return m;
}

double moment_derivative_det_closed_form(double p, double a1, double a2) {
  const double diff = a1 - a2;
  return p * (1.0 - p) * diff * diff * diff * diff;
}

}  // namespace rwre
