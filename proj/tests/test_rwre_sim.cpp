#include "doctest.h"

#include <cmath>
#include <vector>

#include "rwre/bpire.hpp"
#include "rwre/env_models.hpp"
#include "rwre/errors.hpp"
#include "rwre/rwre_sim.hpp"

using namespace rwre;

namespace {
const EnvModel kEx1 = make_two_point_known(0.4, 0.7, 0.3);
}

TEST_CASE("deterministic right drift: T_5 = 5 and no left steps") {
  QuenchedEnv env;
  env.site_lo = -4;
  env.omega.assign(32, 1.0);
  const WalkRecord rec = run_to_hitting_quenched(kEx1, 5, env, substream(1, 0, phase::walk));
  CHECK(rec.hitting_time == 5);
  CHECK(rec.min_site == 0);
  CHECK(rec.sum_left() == 0);
  for (const auto v : rec.left_dense) CHECK(v == 0);
  const auto L = criterion_stats(rec);
  REQUIRE(L.size() == 6);
  for (const auto v : L) CHECK(v == 0);
}

TEST_CASE("bookkeeping identity holds on every record") {
  int r = 0;
  for (const auto& model :
       {kEx1, make_beta(5.0, 1.0), make_two_point_free(0.3, 0.4, 0.7)}) {
    for (std::int64_t n : {37, 256, 1001}) {
      const WalkRecord rec =
          run_to_hitting(model, n, substream(55, r, phase::environment),
                         substream(55, r, phase::walk));
      ++r;
      CHECK(rec.n == n);
      CHECK(rec.hitting_time >= n);
      CHECK((rec.hitting_time - n) % 2 == 0);
      CHECK(rec.sum_left() == (rec.hitting_time - n) / 2);
      CHECK(rec.left_dense[static_cast<std::size_t>(n)] == 0);  // first arrival at n
      CHECK(rec.min_site <= 0);
    }
  }
}

TEST_CASE("quenched records are bit-reproducible") {
  Stream env_stream = substream(2024, 3, phase::environment);
  QuenchedEnv env;
  env.site_lo = -2048;
  env.omega = sample_environment(kEx1, env.site_lo, 300, env_stream);
  const WalkRecord a = run_to_hitting_quenched(kEx1, 300, env, substream(2024, 3, phase::walk));
  const WalkRecord b = run_to_hitting_quenched(kEx1, 300, env, substream(2024, 3, phase::walk));
  CHECK(a.hitting_time == b.hitting_time);
  CHECK(a.min_site == b.min_site);
  CHECK(a.left_dense == b.left_dense);
  CHECK(a.left_negative == b.left_negative);
}

TEST_CASE("nested checkpoints extend one trajectory") {
  HittingWalker walker(kEx1, substream(9, 1, phase::environment), substream(9, 1, phase::walk));
  const WalkRecord r100 = walker.advance_to(100);
  const WalkRecord r200 = walker.advance_to(200);
  CHECK(r100.n == 100);
  CHECK(r200.n == 200);
  CHECK(r200.hitting_time > r100.hitting_time);
  // counts only grow with time on shared sites
  for (std::size_t x = 0; x <= 100; ++x)
    CHECK(r200.left_dense[x] >= r100.left_dense[x]);
  CHECK_THROWS_AS(walker.advance_to(150), std::invalid_argument);
}

TEST_CASE("single-excursion record yields L_0 = 1 and zeros elsewhere") {
  // path 0 -> -1 -> 0 -> 1 -> ... -> n: exactly one left step, from site 0
  WalkRecord rec;
  rec.n = 5;
  rec.hitting_time = 7;
  rec.left_dense.assign(6, 0);
  rec.left_dense[0] = 1;
  rec.min_site = -1;
  const auto L = criterion_stats(rec);
  CHECK(L[0] == 1);
  for (std::size_t x = 1; x < L.size(); ++x) CHECK(L[x] == 0);
  CHECK(rec.sum_left() == (rec.hitting_time - rec.n) / 2);
}

TEST_CASE("hitting-time ratio concentrates near the ballistic speed") {
  // E[T_n/n] -> 7 for Example 1; light version of the acceptance check
  const int reps = 50;
  const std::int64_t n = 2000;
  double acc = 0.0;
  for (int r = 0; r < reps; ++r) {
    const WalkRecord rec = run_to_hitting(kEx1, n, substream(512, r, phase::environment),
                                          substream(512, r, phase::walk));
    acc += static_cast<double>(rec.hitting_time) / static_cast<double>(n);
  }
  CHECK(std::fabs(acc / reps - 7.0) < 0.5);
}

TEST_CASE("variance of T_n/n shrinks along n") {
  const std::int64_t ns[] = {100, 1000, 10000};
  double vars[3];
  for (int k = 0; k < 3; ++k) {
    const int reps = 40;
    std::vector<double> ratio;
    for (int r = 0; r < reps; ++r) {
      const WalkRecord rec =
          run_to_hitting(kEx1, ns[k], substream(600 + k, r, phase::environment),
                         substream(600 + k, r, phase::walk));
      ratio.push_back(static_cast<double>(rec.hitting_time) / static_cast<double>(ns[k]));
    }
    double m = 0.0;
    for (const double v : ratio) m += v;
    m /= reps;
    double v2 = 0.0;
    for (const double v : ratio) v2 += (v - m) * (v - m);
    vars[k] = v2 / reps;
  }
  CHECK(vars[0] > vars[1]);
  CHECK(vars[1] > vars[2]);
}

TEST_CASE("non-ballistic input is refused; runaway guard trips") {
  CHECK_THROWS_AS(
      run_to_hitting(make_two_point_known(0.3, 0.7, 0.5), 10, substream(1, 0, 0),
                     substream(1, 0, 1)),
      std::invalid_argument);

  HittingWalker walker(kEx1, substream(77, 0, phase::environment),
                       substream(77, 0, phase::walk));
  walker.set_step_budget(10);
  CHECK_THROWS_AS(walker.advance_to(1000), runaway_walk_error);
}

TEST_CASE("left-step law matches the branching chain coordinatewise") {
  // (L_n, ..., L_0) ~ (Z_0, ..., Z_n): compare, per coordinate, the mean and
  // a capped second moment (the raw fourth moment is infinite here, so the
  // capped statistic keeps the Monte Carlo error well-defined)
  const std::int64_t n = 50;
  const int reps = 2000;
  const double cap = 20.0;
  struct Acc {
    double m = 0, m2 = 0, w = 0, w2 = 0;  // raw mean, raw square, capped square + its square
  };
  std::vector<Acc> walk(n + 1), chain(n + 1);
  auto absorb = [&](std::vector<Acc>& acc, std::size_t k, double v) {
    acc[k].m += v;
    acc[k].m2 += v * v;
    const double c = std::min(v, cap);
    acc[k].w += c * c;
    acc[k].w2 += c * c * c * c;
  };
  for (int r = 0; r < reps; ++r) {
    const WalkRecord rec = run_to_hitting(kEx1, n, substream(8100, r, phase::environment),
                                          substream(8100, r, phase::walk));
    const auto L = criterion_stats(rec);
    for (std::int64_t k = 0; k <= n; ++k)
      absorb(walk, static_cast<std::size_t>(k),
             static_cast<double>(L[static_cast<std::size_t>(n - k)]));
    Stream cs = substream(9100, r, phase::chain);
    const BpireTrace tr = simulate_chain(kEx1, n, cs);
    for (std::int64_t k = 0; k <= n; ++k)
      absorb(chain, static_cast<std::size_t>(k),
             static_cast<double>(tr.states[static_cast<std::size_t>(k)]));
  }
  for (std::size_t k = 0; k <= static_cast<std::size_t>(n); ++k) {
    const double wm = walk[k].m / reps, cm = chain[k].m / reps;
    const double wvar = walk[k].m2 / reps - wm * wm;
    const double cvar = chain[k].m2 / reps - cm * cm;
    CHECK(std::fabs(wm - cm) <= 5.0 * std::sqrt((wvar + cvar) / reps) + 1e-9);
    const double ww = walk[k].w / reps, cw = chain[k].w / reps;
    const double wwvar = walk[k].w2 / reps - ww * ww;
    const double cwvar = chain[k].w2 / reps - cw * cw;
    CHECK(std::fabs(ww - cw) <= 5.0 * std::sqrt((wwvar + cwvar) / reps) + 1e-9);
  }
}
