#pragma once

#include <stdexcept>
#include <string>

namespace rwre {

// Invalid model parameters and inadmissible theta throw std::invalid_argument.
// The typed errors below are recoverable signals, not programming mistakes.

// E[rho^s] does not exist (Beta family with s >= alpha).
struct infinite_moment_error : std::runtime_error {
  explicit infinite_moment_error(const std::string& what) : std::runtime_error(what) {}
};

// Series for a stationary moment fails its convergence condition.
struct divergent_series_error : std::runtime_error {
  explicit divergent_series_error(const std::string& what) : std::runtime_error(what) {}
};

// Step budget exceeded: the walk is not reaching its target, which points at
// a non-ballistic (mis-specified) model.
struct runaway_walk_error : std::runtime_error {
  explicit runaway_walk_error(const std::string& what) : std::runtime_error(what) {}
};

// Adaptive kernel-row truncation hit its hard cap before the tail shrank.
struct truncation_limit_error : std::runtime_error {
  explicit truncation_limit_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rwre
