#pragma once

// The annealed log-weight
//   phi_theta(x, y) = log integral a^{x+1} (1-a)^y d nu_theta(a)
// with analytic gradient and Hessian per family, and the criterion
//   l_n(theta) = sum_{x=0}^{n-1} phi_theta(L_{x+1}, L_x)
// over the left-step statistics of one walk. Everything is evaluated in log
// domain: the raw weights a^{x+1}(1-a)^y underflow near x ~ 700.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "rwre/env_models.hpp"
#include "rwre/linalg.hpp"

namespace rwre {

double phi(const ModelFamily& family, const SmallVec& theta, std::int64_t x, std::int64_t y);
SmallVec grad_phi(const ModelFamily& family, const SmallVec& theta, std::int64_t x,
                  std::int64_t y);
SmallMat hess_phi(const ModelFamily& family, const SmallVec& theta, std::int64_t x,
                  std::int64_t y);

// value, gradient and Hessian in one pass (optimizer hot path)
struct PhiDerivs {
  double value = 0.0;
  SmallVec grad;
  SmallMat hess;
};
PhiDerivs phi_derivs(const ModelFamily& family, const SmallVec& theta, std::int64_t x,
                     std::int64_t y);

// Beta phi through the explicit product representation
//   sum_{k=0}^{x} log(k+alpha) + sum_{k=0}^{y-1} log(k+beta)
//     - sum_{k=0}^{x+y} log(k+alpha+beta).
// Kept as an independent cross-check of the log-gamma route.
double phi_beta_sum(double alpha, double beta, std::int64_t x, std::int64_t y);

struct LikelihoodEval {
  double value = 0.0;
  SmallVec gradient;
  SmallMat hessian;
  std::int64_t n = 0;
};

// Multiset of consecutive pairs (L_{x+1}, L_x) with multiplicities; the
// criterion is a weighted sum over distinct pairs, which makes optimizer
// iterations O(#distinct) instead of O(n).
struct PairCounts {
  std::vector<std::pair<std::pair<std::int64_t, std::int64_t>, std::int64_t>> items;
  std::int64_t n = 0;
};
PairCounts compress_pairs(std::span<const std::int64_t> left_stats);

// criterion over a dense L vector (L_0..L_n) or its compressed pair counts
LikelihoodEval criterion(const ModelFamily& family, const SmallVec& theta,
                         std::span<const std::int64_t> left_stats);
LikelihoodEval criterion(const ModelFamily& family, const SmallVec& theta,
                         const PairCounts& counts);

}  // namespace rwre
