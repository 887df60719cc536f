#include "doctest.h"

#include <cmath>
#include <vector>

#include "rwre/diagnostics.hpp"
#include "rwre/env_models.hpp"
#include "rwre/likelihood.hpp"
#include "rwre/rng.hpp"
#include "rwre/special_functions.hpp"

using namespace rwre;

namespace {
const EnvModel kEx1 = make_two_point_known(0.4, 0.7, 0.3);
const EnvModel kBeta = make_beta(5.0, 1.0);
const EnvModel kFree = make_two_point_free(0.3, 0.4, 0.7);
}  // namespace

TEST_CASE("phi at the origin: hand-evaluated mixtures") {
  // p a1 + (1-p) a2 = 0.3*0.4 + 0.7*0.7 = 0.61
  CHECK(phi(kEx1.family, kEx1.theta, 0, 0) ==
        doctest::Approx(std::log(0.61)).epsilon(1e-13));
  CHECK(phi(kEx1.family, kEx1.theta, 0, 0) == doctest::Approx(-0.4942963218147801).epsilon(1e-12));
  // Beta: E[omega] = alpha/(alpha+beta) = 5/6
  CHECK(phi(kBeta.family, kBeta.theta, 0, 0) ==
        doctest::Approx(-0.1823215567939546).epsilon(1e-12));
  CHECK(phi(kFree.family, kFree.theta, 0, 0) ==
        doctest::Approx(std::log(0.61)).epsilon(1e-13));
}

TEST_CASE("phi for Beta: log-gamma route equals the explicit-sum route") {
  CHECK(phi(kBeta.family, kBeta.theta, 2, 3) ==
        doctest::Approx(phi_beta_sum(5.0, 1.0, 2, 3)).epsilon(1e-13));
  Stream s(41);
  for (int t = 0; t < 100; ++t) {
    const double alpha = 1.6 + 9.0 * s.next_double();
    const double beta = 0.25 + (alpha - 1.1 - 0.25) * s.next_double();
    const auto x = static_cast<std::int64_t>(s.next_double() * 251);
    const auto y = static_cast<std::int64_t>(s.next_double() * 251);
    SmallVec th{alpha, beta};
    const double lhs = phi(kBeta.family, th, x, y);
    const double rhs = phi_beta_sum(alpha, beta, x, y);
    CHECK(std::fabs(lhs - rhs) <= 1e-12 * std::max(1.0, std::fabs(rhs)));
  }
}

TEST_CASE("gradients at the origin: hand-evaluated") {
  const SmallVec g = grad_phi(kEx1.family, kEx1.theta, 0, 0);
  CHECK(g[0] == doctest::Approx(-0.3 / 0.61).epsilon(1e-13));
  const SmallMat h = hess_phi(kEx1.family, kEx1.theta, 0, 0);
  CHECK(h.at(0, 0) == doctest::Approx(-(0.3 / 0.61) * (0.3 / 0.61)).epsilon(1e-13));

  const SmallVec gb = grad_phi(kBeta.family, kBeta.theta, 0, 0);
  CHECK(gb[0] == doctest::Approx(1.0 / 30.0).epsilon(1e-13));  // 1/alpha - 1/(alpha+beta)
}

TEST_CASE("analytic derivatives match central finite differences") {
  const SuiteResult res = check_finite_differences(150);
  INFO(res.detail);
  CHECK(res.passed);
}

TEST_CASE("free-family Hessian at the removable singularity") {
  // (x+1)(1-a1) - y a1 = 0 at a1 = (x+1)/(x+1+y); smoothness means the
  // analytic value must still match a finite difference of the gradient
  const std::int64_t x = 1, y = 2;
  SmallVec th{0.3, 0.5, 0.7};  // a1 = 2/4 = 0.5 makes the bracket vanish
  const SmallMat h = hess_phi(kFree.family, th, x, y);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(std::isfinite(h.at(i, j)));
  const double step = 1e-6;
  SmallVec up = th, dn = th;
  up[1] += step;
  dn[1] -= step;
  const SmallVec gu = grad_phi(kFree.family, up, x, y);
  const SmallVec gd = grad_phi(kFree.family, dn, x, y);
  for (int i = 0; i < 3; ++i) {
    const double fd = (gu[i] - gd[i]) / (2 * step);
    CHECK(h.at(i, 1) == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
  }
}

TEST_CASE("two-point gradient/Hessian bounds from the box margin") {
  // Theta in [A, 1-A] with A = 0.01 gives |dphi| <= 2/A and |ddphi| <= 4/A^2
  const double A = 0.01;
  const double ps[] = {0.01, 0.3, 0.5, 0.99};
  Stream s(4242);
  for (const double p : ps) {
    SmallVec th{p};
    for (int t = 0; t < 400; ++t) {
      const auto x = static_cast<std::int64_t>(s.next_double() * 1001);
      const auto y = static_cast<std::int64_t>(s.next_double() * 1001);
      const SmallVec g = grad_phi(kEx1.family, th, x, y);
      const SmallMat h = hess_phi(kEx1.family, th, x, y);
      CHECK(std::fabs(g[0]) <= 2.0 / A + 1e-9);
      CHECK(std::fabs(h.at(0, 0)) <= 4.0 / (A * A) + 1e-9);
    }
  }
}

TEST_CASE("Beta gradient grows at most logarithmically") {
  // |d_alpha phi| <= max(beta psi'(alpha), log(1+y)) and the mirrored bound
  // for d_beta; certificates for the log-growth of the score
  Stream s(777);
  for (int t = 0; t < 300; ++t) {
    const double alpha = 1.6 + 9.0 * s.next_double();
    const double beta = 0.25 + (alpha - 1.1 - 0.25) * s.next_double();
    SmallVec th{alpha, beta};
    const auto x = static_cast<std::int64_t>(s.next_double() * 1001);
    const auto y = static_cast<std::int64_t>(s.next_double() * 1001);
    const SmallVec g = grad_phi(kBeta.family, th, x, y);
    CHECK(std::fabs(g[0]) <=
          std::max(beta * sf::trigamma(alpha), std::log1p(static_cast<double>(y))) + 1e-9);
    CHECK(std::fabs(g[1]) <=
          std::max(alpha * sf::trigamma(beta), 1.0 + std::log1p(static_cast<double>(x))) + 1e-9);
  }
}

TEST_CASE("criterion: constant-pair sum and mixture degeneracy") {
  const std::vector<std::int64_t> zeros(6, 0);
  const LikelihoodEval ev = criterion(kEx1.family, kEx1.theta, zeros);
  CHECK(ev.n == 5);
  CHECK(ev.value == doctest::Approx(5.0 * std::log(0.61)).epsilon(1e-13));
  CHECK(ev.gradient[0] == doctest::Approx(5.0 * (-0.3 / 0.61)).epsilon(1e-13));

  // weight pinned against 1: the criterion collapses to the single-atom
  // likelihood sum (L_{x+1}+1) log a1 + L_x log(1-a1)
  ThetaBox box;
  box.lo = {0.01};
  box.hi = {1.0 - 1e-13};
  const EnvModel pinned = make_two_point_known(0.4, 0.7, 1.0 - 1e-9, box);
  const std::vector<std::int64_t> L = {1, 0, 2, 3, 1};
  const LikelihoodEval pe = criterion(pinned.family, pinned.theta, L);
  double single = 0.0;
  for (std::size_t x = 0; x + 1 < L.size(); ++x)
    single += (static_cast<double>(L[x + 1]) + 1.0) * std::log(0.4) +
              static_cast<double>(L[x]) * std::log(0.6);
  CHECK(pe.value == doctest::Approx(single).epsilon(1e-6));
}

TEST_CASE("criterion: dense and pair-count paths agree") {
  Stream s(31);
  std::vector<std::int64_t> L(201);
  for (auto& v : L) v = static_cast<std::int64_t>(s.next_double() * 7);
  const PairCounts counts = compress_pairs(L);
  for (const auto& model : {kEx1, kBeta, kFree}) {
    const LikelihoodEval a = criterion(model.family, model.theta, L);
    const LikelihoodEval b = criterion(model.family, model.theta, counts);
    CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));
    for (int i = 0; i < a.gradient.d; ++i)
      CHECK(a.gradient[i] == doctest::Approx(b.gradient[i]).epsilon(1e-10));
    for (int i = 0; i < a.hessian.d; ++i)
      for (int j = 0; j < a.hessian.d; ++j)
        CHECK(a.hessian.at(i, j) == doctest::Approx(b.hessian.at(i, j)).epsilon(1e-10));
  }
}

TEST_CASE("inadmissible theta raises a domain error") {
  SmallVec bad{1.0};
  CHECK_THROWS_AS(phi(kEx1.family, bad, 0, 0), std::invalid_argument);
  SmallVec bad_beta{2.0, 1.5};
  CHECK_THROWS_AS(phi(kBeta.family, bad_beta, 0, 0), std::invalid_argument);
  SmallVec bad_free{0.3, 0.7, 0.4};
  CHECK_THROWS_AS(phi(kFree.family, bad_free, 0, 0), std::invalid_argument);
}
