#include "rwre/diagnostics.hpp"

#include <cmath>
#include <sstream>

#include "rwre/bpire.hpp"
#include "rwre/env_models.hpp"
#include "rwre/likelihood.hpp"
#include "rwre/rng.hpp"
#include "rwre/special_functions.hpp"

namespace rwre {

namespace {

constexpr double kFdStep = 1e-6;
constexpr double kGradRelTol = 1e-6;
constexpr double kHessRelTol = 1e-5;

std::vector<EnvModel> table_models() {
  return {make_two_point_known(0.4, 0.7, 0.3), make_two_point_free(0.3, 0.4, 0.7),
          make_beta(5.0, 1.0)};
}

// uniform draw from the box, rejected until it sits well inside (so finite
// difference steps stay admissible)
SmallVec sample_theta(const ModelFamily& family, Stream& stream) {
  const int d = family.dim();
  for (;;) {
    SmallVec t(d);
    for (int i = 0; i < d; ++i)
      t[i] = family.box.lo[i] + stream.next_double() * (family.box.hi[i] - family.box.lo[i]);
    if (strictly_inside(family, t, 1e-3)) return t;
  }
}

double rel_err(double got, double want) {
  return std::fabs(got - want) / std::max(1.0, std::fabs(want));
}

}  // namespace

SuiteResult check_finite_differences(int triples_per_family) {
  SuiteResult res{"finite-differences", true, ""};
  Stream stream(substream(0xFD, 0, 0));
  double worst_grad = 0.0, worst_hess = 0.0;
  for (const auto& model : table_models()) {
    const auto& family = model.family;
    const int d = family.dim();
    for (int t = 0; t < triples_per_family; ++t) {
      const SmallVec theta = sample_theta(family, stream);
      const std::int64_t x = static_cast<std::int64_t>(stream.next_double() * 51);
      const std::int64_t y = static_cast<std::int64_t>(stream.next_double() * 51);
      const SmallVec grad = grad_phi(family, theta, x, y);
      const SmallMat hess = hess_phi(family, theta, x, y);
      for (int i = 0; i < d; ++i) {
        SmallVec up = theta, dn = theta;
        up[i] += kFdStep;
        dn[i] -= kFdStep;
        const double fd = (phi(family, up, x, y) - phi(family, dn, x, y)) / (2.0 * kFdStep);
        worst_grad = std::max(worst_grad, rel_err(grad[i], fd));
        const SmallVec gu = grad_phi(family, up, x, y);
        const SmallVec gd = grad_phi(family, dn, x, y);
        for (int j = 0; j < d; ++j) {
          const double hfd = (gu[j] - gd[j]) / (2.0 * kFdStep);
          worst_hess = std::max(worst_hess, rel_err(hess.at(j, i), hfd));
        }
      }
    }
  }
  res.passed = worst_grad <= kGradRelTol && worst_hess <= kHessRelTol;
  std::ostringstream os;
  os << "worst grad rel err " << worst_grad << ", worst hess rel err " << worst_hess;
  res.detail = os.str();
  return res;
}

SuiteResult check_kernel_normalization(int max_x) {
  SuiteResult res{"kernel-normalization", true, ""};
  double worst_low = 0.0, worst_high = 0.0;
  for (const auto& model : table_models())
    for (int x = 0; x <= max_x; ++x) {
      const KernelRow row = kernel_row(model, x, 1e-8);
      double sum = 0.0;
      for (const double p : row.probs) sum += p;
      worst_low = std::max(worst_low, 1.0 - sum);
      worst_high = std::max(worst_high, sum - 1.0);
    }
  res.passed = worst_low <= 1e-8 && worst_high <= 1e-10;
  std::ostringstream os;
  os << "max deficit " << worst_low << ", max excess " << worst_high;
  res.detail = os.str();
  return res;
}

SuiteResult check_beta_dual_formula() {
  SuiteResult res{"beta-dual-formula", true, ""};
  Stream stream(substream(0xBE7A, 0, 0));
  const ModelFamily family = make_beta(5.0, 1.0).family;
  double worst = 0.0;
  for (int t = 0; t < 400; ++t) {
    SmallVec theta = sample_theta(family, stream);
    const auto x = static_cast<std::int64_t>(stream.next_double() * 251);
    const auto y = static_cast<std::int64_t>(stream.next_double() * 251);
    const double via_gamma = phi(family, theta, x, y);
    const double via_sum = phi_beta_sum(theta[0], theta[1], x, y);
    worst = std::max(worst, std::fabs(via_gamma - via_sum) / std::max(1.0, std::fabs(via_sum)));
  }
  res.passed = worst <= 1e-12;
  res.detail = "worst rel disagreement " + std::to_string(worst);
  return res;
}

SuiteResult check_derivative_exchange(int max_x) {
  SuiteResult res{"derivative-exchange", true, ""};
  double worst = 0.0;
  for (const auto& model : table_models())
    for (int x = 0; x <= max_x; ++x) {
      const KernelRow row = kernel_row(model, x, 1e-10);
      SmallVec sum(model.family.dim());
      for (std::size_t y = 0; y < row.probs.size(); ++y) {
        const SmallVec g =
            grad_phi(model.family, model.theta, x, static_cast<std::int64_t>(y));
        for (int i = 0; i < sum.d; ++i) sum[i] += row.probs[y] * g[i];
      }
      worst = std::max(worst, sum.norm_inf());
    }
  res.passed = worst <= 1e-6;
  res.detail = "max |sum_y dQ(x,y)| " + std::to_string(worst);
  return res;
}

SuiteResult check_quantile_roundtrip() {
  SuiteResult res{"quantile-roundtrip", true, ""};
  const double levels[] = {0.9, 0.95, 0.975, 0.99, 0.995};
  double worst = 0.0;
  for (const double u : levels) {
    worst = std::max(worst, std::fabs(sf::normal_cdf(sf::normal_quantile(u)) - u));
    for (int d = 1; d <= 3; ++d)
      worst = std::max(worst, std::fabs(sf::chi2_cdf(sf::chi2_quantile(u, d), d) - u));
  }
  res.passed = worst <= 1e-10;
  res.detail = "worst |cdf(quantile(u)) - u| " + std::to_string(worst);
  return res;
}

std::vector<SuiteResult> run_all_checks() {
  return {check_finite_differences(), check_kernel_normalization(), check_beta_dual_formula(),
          check_derivative_exchange(), check_quantile_roundtrip()};
}

}  // namespace rwre
