#include "rwre/bpire.hpp"

#include <cmath>
#include <stdexcept>

#include "rwre/errors.hpp"
#include "rwre/likelihood.hpp"
#include "rwre/special_functions.hpp"

namespace rwre {

namespace {

double rho_of(double omega) { return (1.0 - omega) / omega; }

constexpr std::size_t kRowCap = 1'000'000;

}  // namespace

double kernel_prob(const EnvModel& model, std::int64_t x, std::int64_t y) {
  if (x < 0 || y < 0) throw std::invalid_argument("kernel_prob: states are nonnegative");
  const double log_binom = sf::log_gamma(static_cast<double>(x + y) + 1.0) -
                           sf::log_gamma(static_cast<double>(x) + 1.0) -
                           sf::log_gamma(static_cast<double>(y) + 1.0);
  return std::exp(log_binom + phi(model.family, model.theta, x, y));
}

KernelRow kernel_row(const EnvModel& model, std::int64_t x, double tail_tol) {
  KernelRow row;
  row.x = x;
  double sum = 0.0;
  for (std::size_t y = 0;; ++y) {
    if (y >= kRowCap)
      throw truncation_limit_error("kernel_row: row did not normalize within cap");
    row.probs.push_back(kernel_prob(model, x, static_cast<std::int64_t>(y)));
    sum += row.probs.back();
    if (1.0 - sum < tail_tol) break;
  }
  row.tail_mass = std::max(0.0, 1.0 - sum);
  return row;
}

std::int64_t sample_geometric(double omega, Stream& stream) {
  if (!(omega > 0.0 && omega <= 1.0))
    throw std::invalid_argument("sample_geometric: omega in (0,1]");
  if (omega == 1.0) return 0;
  const double u = stream.next_double_open();
  return static_cast<std::int64_t>(std::floor(std::log(u) / std::log1p(-omega)));
}

std::int64_t step_chain(const EnvModel& model, std::int64_t z, Stream& stream) {
  if (z < 0) throw std::invalid_argument("step_chain: state must be nonnegative");
  const double omega = sample_omega(model, stream);
  std::int64_t next = 0;
  for (std::int64_t i = 0; i <= z; ++i) next += sample_geometric(omega, stream);
  return next;
}

BpireTrace simulate_chain(const EnvModel& model, std::int64_t steps, Stream& stream) {
  validate(model);
  if (steps < 0) throw std::invalid_argument("simulate_chain: steps must be nonnegative");
  BpireTrace trace;
  trace.model = model;
  trace.states.reserve(static_cast<std::size_t>(steps) + 1);
  trace.states.push_back(0);
  std::int64_t z = 0;
  for (std::int64_t k = 0; k < steps; ++k) {
    z = step_chain(model, z, stream);
    trace.states.push_back(z);
  }
  return trace;
}

double stationary_factorial_moment(const EnvModel& model, int j, std::int64_t n_terms,
                                   Stream& stream, std::int64_t n_replicates) {
  if (j < 0) throw std::invalid_argument("stationary_factorial_moment: j >= 0");
  double r;  // E[rho^{j+1}] controls convergence of the series
  try {
    r = rho_moment(model, static_cast<double>(j + 1));
  } catch (const infinite_moment_error&) {
    throw divergent_series_error("stationary_factorial_moment: E[rho^(j+1)] infinite");
  }
  if (r >= 1.0)
    throw divergent_series_error("stationary_factorial_moment: requires E[rho^(j+1)] < 1");

  const double e_rho = rho_moment(model, 1.0);
  if (j == 0) return e_rho / (1.0 - e_rho);  // exact geometric series

  if (n_terms <= 0) {
    // Minkowski tail bound: remainder after N terms is at most
    // r^{N/(j+1)} / (1 - r^{1/(j+1)}) in L^{j+1} norm.
    const double root = std::pow(r, 1.0 / (j + 1));
    const double target = 1e-6 * (1.0 - root);
    n_terms = static_cast<std::int64_t>(
        std::ceil(static_cast<double>(j + 1) * std::log(target) / std::log(r)));
    n_terms = std::min<std::int64_t>(std::max<std::int64_t>(n_terms, 8), 100000);
  }

  double acc = 0.0;
  for (std::int64_t rep = 0; rep < n_replicates; ++rep) {
    double prod = 1.0;
    double s = 0.0;
    for (std::int64_t k = 0; k < n_terms; ++k) {
      prod *= rho_of(sample_omega(model, stream));
      s += prod;
    }
    acc += std::pow(s, static_cast<double>(j + 1));
  }
  double factorial = 1.0;
  for (int i = 2; i <= j + 1; ++i) factorial *= i;
  return factorial * acc / static_cast<double>(n_replicates);
}

}  // namespace rwre
