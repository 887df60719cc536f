#pragma once

// Parametric environment families for the site probabilities omega_x:
//   two_point_known : nu = p delta_{a1} + (1-p) delta_{a2}, theta = p
//   two_point_free  : same support but theta = (p, a1, a2)
//   beta            : omega ~ Beta(alpha, beta), theta = (alpha, beta)
// plus regime classification (transience, ballisticity, fluctuation
// exponent kappa) through the ratio rho = (1 - omega)/omega.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rwre/linalg.hpp"
#include "rwre/rng.hpp"

namespace rwre {

enum class Family { two_point_known, two_point_free, beta };

const char* family_name(Family f);
Family family_from_name(const std::string& name);
int family_dim(Family f);

// Per-coordinate closed interval bounds. Families with an ordering
// constraint additionally couple coordinates through `order_gap`:
//   two_point_free: a2 >= a1 + gap   (gap = 0.05)
//   beta:           beta <= alpha - gap  (gap = 1.05, keeps alpha > beta + 1)
struct ThetaBox {
  SmallVec lo, hi;
};

struct ModelFamily {
  Family kind = Family::two_point_known;
  double a1 = 0.0, a2 = 0.0;  // fixed support points, two_point_known only
  ThetaBox box;

  int dim() const { return family_dim(kind); }
  double order_gap() const;
};

struct EnvModel {
  ModelFamily family;
  SmallVec theta;
};

ThetaBox default_box(Family f);

// Constructors validate parameters and install the default box unless one is
// supplied. Invalid parameters throw std::invalid_argument.
EnvModel make_two_point_known(double a1, double a2, double p,
                              std::optional<ThetaBox> box = std::nullopt);
EnvModel make_two_point_free(double p, double a1, double a2,
                             std::optional<ThetaBox> box = std::nullopt);
EnvModel make_beta(double alpha, double beta,
                   std::optional<ThetaBox> box = std::nullopt);
EnvModel make_model(const ModelFamily& family, const SmallVec& theta);

void validate(const EnvModel& model);  // throws std::invalid_argument

// Box geometry (including the ordering coupling).
bool in_box(const ModelFamily& family, const SmallVec& theta);
bool strictly_inside(const ModelFamily& family, const SmallVec& theta, double margin);
SmallVec project_to_box(const ModelFamily& family, SmallVec theta);

// One site probability drawn from nu_theta.
double sample_omega(const EnvModel& model, Stream& stream);

// i.i.d. environment on sites site_lo..site_hi (inclusive), drawn in
// increasing site order. Requires site_lo <= 0 <= site_hi.
std::vector<double> sample_environment(const EnvModel& model, std::int64_t site_lo,
                                       std::int64_t site_hi, Stream& stream);

// E^theta[rho_0^s] for s > 0. Two-point families in closed form; Beta via
// log-gamma, throwing infinite_moment_error when s >= alpha.
double rho_moment(const EnvModel& model, double s);

// E^theta[log rho_0]
double log_rho_mean(const EnvModel& model);

struct RegimeReport {
  double e_log_rho = 0.0;
  double e_rho = 0.0;  // +inf when the first moment does not exist
  bool transient_right = false;
  bool ballistic = false;
  double kappa = 0.0;  // root of E[rho^s] = 1; +inf if none below s_max; NaN if not transient right
  std::optional<double> speed_limit_c;  // (1+E rho)/(1-E rho), ballistic only
};

RegimeReport classify_regime(const EnvModel& model);

}  // namespace rwre
