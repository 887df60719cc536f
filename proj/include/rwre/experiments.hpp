#pragma once

// Seeded replication experiments: per replicate, one environment + walk
// stopped at successive checkpoints, an estimate with observed information
// and confidence regions at each stop, aggregated into coverage tables and
// long-format boxplot data. Replicates are independent, so the loop runs
// either serially (reference implementation) or OpenMP-parallel; both
// produce bit-identical results for a fixed master seed.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rwre/env_models.hpp"
#include "rwre/estimator.hpp"

#include "json.hpp"

namespace rwre {

struct ExperimentConfig {
  EnvModel model;  // family + true theta used for generation
  std::vector<std::int64_t> checkpoints = {1000, 2000, 3000, 4000, 5000,
                                           6000, 7000, 8000, 9000, 10000};
  int replicates = 1000;
  std::vector<double> gammas = {0.01, 0.05, 0.1};
  std::uint64_t master_seed = 1;
  int workers = 0;       // 0 = all hardware threads, 1 = serial reference
  bool nested = true;    // one walk stopped successively vs independent walks
};

ExperimentConfig config_from_json(const nlohmann::json& j);  // std::invalid_argument on bad input
nlohmann::json config_to_json(const ExperimentConfig& cfg);  // excludes runtime fields (workers)

struct CheckpointResult {
  std::int64_t n = 0;
  bool simulated = false;  // false when the walk/estimation threw
  std::int64_t t_n = 0;
  std::int64_t min_site = 0;
  OptStatus status = OptStatus::failed;
  SmallVec theta_hat;
  SmallMat sigma_hat;
  double grad_norm = 0.0;
  bool region_ok = false;          // converged and sigma_hat positive definite
  std::vector<int> covered;        // per gamma, 1/0; meaningful when region_ok
};

struct ReplicateResult {
  int replicate = 0;
  std::vector<CheckpointResult> checkpoints;
};

ReplicateResult run_replicate(const ExperimentConfig& cfg, int replicate);

std::vector<ReplicateResult> run_replicates_serial(const ExperimentConfig& cfg);
std::vector<ReplicateResult> run_replicates_parallel(const ExperimentConfig& cfg, int workers);
std::vector<ReplicateResult> run_replicates(const ExperimentConfig& cfg);  // dispatch on workers

struct CoverageCell {
  std::int64_t n = 0;
  double gamma = 0.0;
  int covered = 0;
  int usable = 0;
  int failed = 0;
};

struct CoverageTable {
  std::vector<CoverageCell> cells;  // ordered by (checkpoint, gamma)
  int replicates = 0;
};

CoverageTable aggregate_coverage(const ExperimentConfig& cfg,
                                 const std::vector<ReplicateResult>& results);

// d(d+1)/2 distinct entries of sigma_hat in reporting order:
// diagonal first, then upper off-diagonals row by row.
std::vector<std::pair<int, int>> sigma_cell_order(int d);
std::string sigma_cell_label(int i, int j);

// shortest round-trip decimal representation (byte-stable output)
std::string format_double(double v);

void write_coverage_csv(std::ostream& os, const CoverageTable& table);
void write_replicates_csv(std::ostream& os, const ExperimentConfig& cfg,
                          const std::vector<ReplicateResult>& results);
void write_boxplot_csv(std::ostream& os, const ExperimentConfig& cfg,
                       const std::vector<ReplicateResult>& results);
nlohmann::json boxplot_summary(const ExperimentConfig& cfg,
                               const std::vector<ReplicateResult>& results);
nlohmann::json run_manifest(const ExperimentConfig& cfg);

}  // namespace rwre
