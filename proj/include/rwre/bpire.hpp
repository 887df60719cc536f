#pragma once

// Companion branching process with immigration in random environment:
//   Z_0 = 0,  Z_{k+1} = sum of (Z_k + 1) geometric(omega_k) offspring,
// one fresh omega_k ~ nu_theta per generation. Under the annealed law
// (L_n, ..., L_0) of the stopped walk is distributed as (Z_0, ..., Z_n), and
// the chain's transition kernel is
//   Q_theta(x, y) = binom(x+y, x) exp(phi_theta(x, y)).

#include <cstdint>
#include <vector>

#include "rwre/env_models.hpp"
#include "rwre/rng.hpp"

namespace rwre {

struct BpireTrace {
  std::vector<std::int64_t> states;  // Z_0..Z_n, states[0] = 0
  EnvModel model;
};

struct KernelRow {
  std::int64_t x = 0;
  std::vector<double> probs;  // Q(x, y) for y = 0..probs.size()-1
  double tail_mass = 0.0;
};

// Q_theta(x, y), assembled in log domain (log-binomial via log-gamma) and
// exponentiated last.
double kernel_prob(const EnvModel& model, std::int64_t x, std::int64_t y);

// Adaptive row: grows until tail_mass < tail_tol, throws
// truncation_limit_error past 10^6 entries.
KernelRow kernel_row(const EnvModel& model, std::int64_t x, double tail_tol = 1e-8);

// Geometric on {0,1,...} with success probability omega, by inversion.
std::int64_t sample_geometric(double omega, Stream& stream);

// One annealed transition from state z.
std::int64_t step_chain(const EnvModel& model, std::int64_t z, Stream& stream);

// Z_0..Z_steps
BpireTrace simulate_chain(const EnvModel& model, std::int64_t steps, Stream& stream);

// (j+1)! E[(sum_{n>=1} prod_{k<=n} rho_k)^{j+1}], the j-th factorial moment
// of the stationary law. j = 0 is the closed form E[rho]/(1 - E[rho]); higher
// j are Monte Carlo averages over environment draws with the series truncated
// once the remaining tail bound drops below 1e-6. Throws
// divergent_series_error when E[rho^{j+1}] >= 1, and accepts n_terms <= 0 to
// pick the truncation length from that bound.
double stationary_factorial_moment(const EnvModel& model, int j, std::int64_t n_terms,
                                   Stream& stream, std::int64_t n_replicates = 100000);

}  // namespace rwre
