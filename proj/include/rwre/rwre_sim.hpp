#pragma once

// Quenched nearest-neighbour walk on Z started at 0, simulated until it first
// hits a target site n, accumulating the per-site left-step counts L_x that
// feed the likelihood. Environments grow lazily on the left in fixed blocks,
// so nothing is ever truncated.

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "rwre/env_models.hpp"
#include "rwre/rng.hpp"

namespace rwre {

struct WalkRecord {
  std::int64_t n = 0;             // target site
  std::int64_t hitting_time = 0;  // T_n, in steps
  std::vector<std::int64_t> left_dense;        // L_x for x = 0..n
  std::map<std::int64_t, std::int64_t> left_negative;  // L_x for visited x < 0
  std::int64_t min_site = 0;

  std::int64_t left_count(std::int64_t x) const;
  std::int64_t sum_left() const;  // equals (T_n - n)/2
};

// Pre-drawn environment covering sites [site_lo, site_lo + omega.size()).
struct QuenchedEnv {
  std::vector<double> omega;
  std::int64_t site_lo = 0;
};

// Incremental walker: advance_to may be called with increasing targets to
// stop one trajectory at successive hitting times (nested checkpoints).
class HittingWalker {
 public:
  // annealed mode: environment drawn lazily from its own stream
  HittingWalker(EnvModel model, Stream env_stream, Stream step_stream);
  // quenched mode: fixed environment table; leaving it is an error
  HittingWalker(EnvModel model, QuenchedEnv env, Stream step_stream);

  // Runs until the walk first sits at site n (n larger than any previous
  // target) and returns the summary at that instant. Throws
  // runaway_walk_error when the step budget is exhausted.
  WalkRecord advance_to(std::int64_t n);

  void set_step_budget(std::int64_t budget) { step_budget_ = budget; }
  std::int64_t steps_taken() const { return steps_; }

 private:
  double omega_at(std::int64_t x);

  EnvModel model_;
  bool quenched_ = false;
  QuenchedEnv fixed_env_;
  Stream env_stream_;
  Stream step_stream_;
  std::vector<double> env_right_;  // sites 0,1,2,...
  std::vector<double> env_left_;   // sites -1,-2,... grown in blocks
  std::vector<std::int64_t> left_right_;  // left-step counts at sites >= 0
  std::vector<std::int64_t> left_neg_;    // left-step counts at sites < 0
  std::int64_t pos_ = 0;
  std::int64_t steps_ = 0;
  std::int64_t min_site_ = 0;
  std::int64_t last_target_ = 0;
  std::int64_t step_budget_ = kDefaultStepBudget;

 public:
  static constexpr std::int64_t kDefaultStepBudget = 10'000'000'000;
  static constexpr std::int64_t kLeftBlock = 1024;
};

// One-shot helpers around the walker. The annealed variant draws a fresh
// environment from env_stream; both require a ballistic model.
WalkRecord run_to_hitting(const EnvModel& model, std::int64_t n, Stream env_stream,
                          Stream step_stream);
WalkRecord run_to_hitting_quenched(const EnvModel& model, std::int64_t n, QuenchedEnv env,
                                   Stream step_stream);

// The n+1 counts (L_0, ..., L_n) entering the criterion; negative sites are
// part of the record but not of the likelihood.
std::vector<std::int64_t> criterion_stats(const WalkRecord& record);

}  // namespace rwre
