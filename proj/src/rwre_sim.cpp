#include "rwre/rwre_sim.hpp"

#include <stdexcept>

#include "rwre/errors.hpp"

namespace rwre {

std::int64_t WalkRecord::left_count(std::int64_t x) const {
  if (x >= 0) {
    if (x > n) return 0;
    return left_dense[static_cast<std::size_t>(x)];
  }
  const auto it = left_negative.find(x);
  return it == left_negative.end() ? 0 : it->second;
}

std::int64_t WalkRecord::sum_left() const {
  std::int64_t s = 0;
  for (const auto v : left_dense) s += v;
  for (const auto& [site, v] : left_negative) s += v;
  return s;
}

HittingWalker::HittingWalker(EnvModel model, Stream env_stream, Stream step_stream)
    : model_(std::move(model)), env_stream_(env_stream), step_stream_(step_stream) {
  validate(model_);
  const auto regime = classify_regime(model_);
  if (!regime.ballistic)
    throw std::invalid_argument("run_to_hitting: model is not ballistic");
}

HittingWalker::HittingWalker(EnvModel model, QuenchedEnv env, Stream step_stream)
    : model_(std::move(model)),
      quenched_(true),
      fixed_env_(std::move(env)),
      env_stream_(0),
      step_stream_(step_stream) {
  validate(model_);
  if (!classify_regime(model_).ballistic)
    throw std::invalid_argument("run_to_hitting: model is not ballistic");
  if (fixed_env_.omega.empty() || fixed_env_.site_lo > 0)
    throw std::invalid_argument("quenched environment must cover site 0");
}

double HittingWalker::omega_at(std::int64_t x) {
  if (quenched_) {
    const std::int64_t idx = x - fixed_env_.site_lo;
    if (idx < 0 || idx >= static_cast<std::int64_t>(fixed_env_.omega.size()))
      throw std::out_of_range("walk left the quenched environment table");
    return fixed_env_.omega[static_cast<std::size_t>(idx)];
  }
  if (x >= 0) {
    while (static_cast<std::int64_t>(env_right_.size()) <= x)
      env_right_.push_back(sample_omega(model_, env_stream_));
    return env_right_[static_cast<std::size_t>(x)];
  }
  const std::int64_t idx = -x - 1;
  while (static_cast<std::int64_t>(env_left_.size()) <= idx) {
    env_left_.reserve(env_left_.size() + kLeftBlock);
    for (std::int64_t i = 0; i < kLeftBlock; ++i)
      env_left_.push_back(sample_omega(model_, env_stream_));
  }
  return env_left_[static_cast<std::size_t>(idx)];
}

WalkRecord HittingWalker::advance_to(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("advance_to: target must be >= 1");
  if (n <= last_target_) throw std::invalid_argument("advance_to: targets must increase");
  if (static_cast<std::int64_t>(left_right_.size()) < n + 1)
    left_right_.resize(static_cast<std::size_t>(n + 1), 0);

  while (pos_ != n) {
    if (steps_ >= step_budget_)
      throw runaway_walk_error("step budget exceeded; input looks non-ballistic");
    const double w = omega_at(pos_);
    if (step_stream_.next_double() < w) {
      ++pos_;
    } else {
      if (pos_ >= 0) {
        ++left_right_[static_cast<std::size_t>(pos_)];
      } else {
        const std::size_t idx = static_cast<std::size_t>(-pos_ - 1);
        if (left_neg_.size() <= idx) left_neg_.resize(idx + 1, 0);
        ++left_neg_[idx];
      }
      --pos_;
      min_site_ = std::min(min_site_, pos_);
    }
    ++steps_;
  }
  last_target_ = n;

  WalkRecord rec;
  rec.n = n;
  rec.hitting_time = steps_;
  rec.min_site = min_site_;
  rec.left_dense.assign(left_right_.begin(), left_right_.begin() + n + 1);
  for (std::size_t i = 0; i < left_neg_.size(); ++i)
    if (left_neg_[i] > 0) rec.left_negative[-static_cast<std::int64_t>(i) - 1] = left_neg_[i];
  return rec;
}

WalkRecord run_to_hitting(const EnvModel& model, std::int64_t n, Stream env_stream,
                          Stream step_stream) {
  HittingWalker w(model, env_stream, step_stream);
  return w.advance_to(n);
}

WalkRecord run_to_hitting_quenched(const EnvModel& model, std::int64_t n, QuenchedEnv env,
                                   Stream step_stream) {
  HittingWalker w(model, std::move(env), step_stream);
  return w.advance_to(n);
}

std::vector<std::int64_t> criterion_stats(const WalkRecord& record) {
  return record.left_dense;
}

}  // namespace rwre
