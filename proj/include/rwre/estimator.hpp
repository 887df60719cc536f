#pragma once

// Criterion maximization over the compact box Theta, the observed Fisher
// information, asymptotic confidence regions, and the naive hitting-time
// inversion estimator for the two-atom symmetric (Temkin) environment.

#include <cstdint>
#include <map>
#include <span>

#include "rwre/env_models.hpp"
#include "rwre/likelihood.hpp"
#include "rwre/linalg.hpp"
#include "rwre/rng.hpp"

namespace rwre {

enum class OptStatus { converged, boundary, failed };
const char* opt_status_name(OptStatus s);

struct Region {
  bool available = false;  // false when sigma_hat is not positive definite
  int d = 0;
  double n = 0.0;
  double gamma = 0.0;
  SmallVec center;
  SmallMat sigma;
  double threshold = 0.0;   // chi-square quantile chi_{1-gamma}(d)
  double half_width = 0.0;  // d = 1 only: q_{1-gamma/2} / sqrt(n sigma)
};

// membership test  n (center - theta)^T Sigma (center - theta) <= threshold
bool covers(const Region& region, const SmallVec& theta_star);

struct EstimateReport {
  SmallVec theta_hat;
  SmallMat sigma_hat;            // observed information at theta_hat
  OptStatus status = OptStatus::failed;
  std::int64_t n = 0;
  double grad_norm = 0.0;        // sup-norm of the criterion gradient at theta_hat
  double value = 0.0;            // criterion value at theta_hat
  std::map<double, Region> regions;  // gamma -> region, filled on demand
};

struct MleOptions {
  int starts = 8;            // box center + quasi-random points
  int max_iterations = 200;  // Newton iterations per start
  double grad_tol_factor = 1e-6;  // converged when |grad|_inf <= factor * n
  double step_tol = 1e-10;
  double interior_margin = 1e-7;  // fraction of the box span
};

// Multi-start projected Newton with Hessian modification and Armijo
// backtracking; one-dimensional families use a golden-section bracket with a
// Newton polish. Never throws for data-dependent trouble: failures are
// encoded in the status.
EstimateReport mle(const ModelFamily& family, const PairCounts& counts, Stream& stream,
                   const MleOptions& options = {});
EstimateReport mle(const ModelFamily& family, std::span<const std::int64_t> left_stats,
                   Stream& stream, const MleOptions& options = {});

// Sigma_hat = -(1/n) * criterion Hessian at theta_hat, symmetrized.
SmallMat observed_fisher(const ModelFamily& family, const SmallVec& theta_hat,
                         const PairCounts& counts);

Region confidence_region(const EstimateReport& report, double gamma);

// Naive estimator for nu = p delta_a + (1-p) delta_{1-a}, a in (1/2,1):
// inverts the ballistic speed c(p) = (a + p - 2ap)/((2a-1)(p-a)) at T_n/n.
double temkin_naive(double t_n, double n, double a);
double temkin_speed(double p, double a);  // c(p)

// Nondegeneracy diagnostic for the free two-point family: the matrix
// (d/dtheta E[omega^{k+1}])_{k=0,1,2} whose determinant has the closed form
// p (1-p) (a1 - a2)^4.
SmallMat moment_derivative_matrix(double p, double a1, double a2);
double moment_derivative_det_closed_form(double p, double a1, double a2);

}  // namespace rwre
