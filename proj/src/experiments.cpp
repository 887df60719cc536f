#include "rwre/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rwre/rwre_sim.hpp"

#ifndef RWRE_GIT_DESCRIBE
#define RWRE_GIT_DESCRIBE "unknown"
#endif

namespace rwre {

namespace {

SmallVec vec_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() > 3) throw std::invalid_argument("expected array of <= 3 numbers");
  SmallVec v(static_cast<int>(j.size()));
  for (int i = 0; i < v.d; ++i) v[i] = j[static_cast<std::size_t>(i)].get<double>();
  return v;
}

nlohmann::json vec_to_json(const SmallVec& v) {
  nlohmann::json j = nlohmann::json::array();
  for (int i = 0; i < v.d; ++i) j.push_back(v[i]);
  return j;
}

CheckpointResult estimate_checkpoint(const ExperimentConfig& cfg, int replicate,
                                     std::size_t checkpoint_index, const WalkRecord& rec) {
  CheckpointResult out;
  out.n = rec.n;
  out.simulated = true;
  out.t_n = rec.hitting_time;
  out.min_site = rec.min_site;

  const PairCounts counts = compress_pairs(criterion_stats(rec));
  Stream opt_stream =
      substream(cfg.master_seed, static_cast<std::uint64_t>(replicate), phase::optimizer,
                checkpoint_index);
  EstimateReport report = mle(cfg.model.family, counts, opt_stream);
  out.status = report.status;
  out.theta_hat = report.theta_hat;
  out.sigma_hat = report.sigma_hat;
  out.grad_norm = report.grad_norm;

  out.covered.assign(cfg.gammas.size(), 0);
  out.region_ok = report.status == OptStatus::converged;
  for (std::size_t g = 0; g < cfg.gammas.size(); ++g) {
    const Region region = confidence_region(report, cfg.gammas[g]);
    if (!region.available) {
      out.region_ok = false;
      break;
    }
    out.covered[g] = covers(region, cfg.model.theta) ? 1 : 0;
  }
  return out;
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j) {
  try {
    ExperimentConfig cfg;
    const auto& jm = j.at("model");
    const Family kind = family_from_name(jm.at("family").get<std::string>());
    ModelFamily family;
    family.kind = kind;
    family.box = default_box(kind);
    if (kind == Family::two_point_known) {
      const auto& atoms = jm.at("a");
      family.a1 = atoms.at(0).get<double>();
      family.a2 = atoms.at(1).get<double>();
    }
    if (jm.contains("box")) {
      const auto& jb = jm.at("box");
      if (jb.size() != static_cast<std::size_t>(family.dim()))
        throw std::invalid_argument("box must have one [lo,hi] per coordinate");
      for (int i = 0; i < family.dim(); ++i) {
        family.box.lo[i] = jb[static_cast<std::size_t>(i)].at(0).get<double>();
        family.box.hi[i] = jb[static_cast<std::size_t>(i)].at(1).get<double>();
        if (!(family.box.lo[i] < family.box.hi[i]))
          throw std::invalid_argument("box intervals must be nonempty");
      }
    }
    cfg.model = make_model(family, vec_from_json(jm.at("theta")));

    if (j.contains("checkpoints")) {
      cfg.checkpoints.clear();
      for (const auto& v : j.at("checkpoints")) cfg.checkpoints.push_back(v.get<std::int64_t>());
      if (cfg.checkpoints.empty()) throw std::invalid_argument("checkpoints must be nonempty");
      for (std::size_t i = 0; i < cfg.checkpoints.size(); ++i) {
        if (cfg.checkpoints[i] < 1) throw std::invalid_argument("checkpoints must be >= 1");
        if (i > 0 && cfg.checkpoints[i] <= cfg.checkpoints[i - 1])
          throw std::invalid_argument("checkpoints must be strictly increasing");
      }
    }
    if (j.contains("replicates")) cfg.replicates = j.at("replicates").get<int>();
    if (cfg.replicates < 1) throw std::invalid_argument("replicates must be >= 1");
    if (j.contains("gammas")) {
      cfg.gammas.clear();
      for (const auto& v : j.at("gammas")) cfg.gammas.push_back(v.get<double>());
      for (const double g : cfg.gammas)
        if (!(g > 0.0 && g < 1.0)) throw std::invalid_argument("gammas must lie in (0,1)");
    }
    if (j.contains("seed")) cfg.master_seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("workers")) cfg.workers = j.at("workers").get<int>();
    if (j.contains("nested")) cfg.nested = j.at("nested").get<bool>();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad config: ") + e.what());
  }
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json jm;
  jm["family"] = family_name(cfg.model.family.kind);
  if (cfg.model.family.kind == Family::two_point_known)
    jm["a"] = {cfg.model.family.a1, cfg.model.family.a2};
  jm["theta"] = vec_to_json(cfg.model.theta);
  nlohmann::json jb = nlohmann::json::array();
  for (int i = 0; i < cfg.model.family.dim(); ++i)
    jb.push_back({cfg.model.family.box.lo[i], cfg.model.family.box.hi[i]});
  jm["box"] = jb;

  nlohmann::json j;
  j["model"] = jm;
  j["checkpoints"] = cfg.checkpoints;
  j["replicates"] = cfg.replicates;
  j["gammas"] = cfg.gammas;
  j["seed"] = cfg.master_seed;
  j["nested"] = cfg.nested;
  return j;
}

ReplicateResult run_replicate(const ExperimentConfig& cfg, int replicate) {
  ReplicateResult out;
  out.replicate = replicate;
  const auto id = static_cast<std::uint64_t>(replicate);
  std::size_t k = 0;
  try {
    if (cfg.nested) {
      HittingWalker walker(cfg.model, substream(cfg.master_seed, id, phase::environment),
                           substream(cfg.master_seed, id, phase::walk));
      for (; k < cfg.checkpoints.size(); ++k) {
        const WalkRecord rec = walker.advance_to(cfg.checkpoints[k]);
        out.checkpoints.push_back(estimate_checkpoint(cfg, replicate, k, rec));
      }
    } else {
      for (; k < cfg.checkpoints.size(); ++k) {
        HittingWalker walker(cfg.model,
                             substream(cfg.master_seed, id, phase::environment, k),
                             substream(cfg.master_seed, id, phase::walk, k));
        const WalkRecord rec = walker.advance_to(cfg.checkpoints[k]);
        out.checkpoints.push_back(estimate_checkpoint(cfg, replicate, k, rec));
      }
    }
  } catch (const std::exception&) {
    // a replicate failure never aborts the run; remaining checkpoints are
    // recorded as failed
    for (; k < cfg.checkpoints.size(); ++k) {
      CheckpointResult failed;
      failed.n = cfg.checkpoints[k];
      failed.covered.assign(cfg.gammas.size(), 0);
      out.checkpoints.push_back(failed);
    }
  }
  return out;
}

std::vector<ReplicateResult> run_replicates_serial(const ExperimentConfig& cfg) {
  std::vector<ReplicateResult> results(static_cast<std::size_t>(cfg.replicates));
  for (int r = 0; r < cfg.replicates; ++r)
    results[static_cast<std::size_t>(r)] = run_replicate(cfg, r);
  return results;
}

std::vector<ReplicateResult> run_replicates_parallel(const ExperimentConfig& cfg, int workers) {
  std::vector<ReplicateResult> results(static_cast<std::size_t>(cfg.replicates));
#ifdef _OPENMP
  const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int r = 0; r < cfg.replicates; ++r)
    results[static_cast<std::size_t>(r)] = run_replicate(cfg, r);
#else
  (void)workers;
  for (int r = 0; r < cfg.replicates; ++r)
    results[static_cast<std::size_t>(r)] = run_replicate(cfg, r);
#endif
  return results;
}

std::vector<ReplicateResult> run_replicates(const ExperimentConfig& cfg) {
  if (cfg.workers == 1) return run_replicates_serial(cfg);
  return run_replicates_parallel(cfg, cfg.workers);
}

CoverageTable aggregate_coverage(const ExperimentConfig& cfg,
                                 const std::vector<ReplicateResult>& results) {
  CoverageTable table;
  table.replicates = cfg.replicates;
  for (std::size_t k = 0; k < cfg.checkpoints.size(); ++k)
    for (std::size_t g = 0; g < cfg.gammas.size(); ++g) {
      CoverageCell cell;
      cell.n = cfg.checkpoints[k];
      cell.gamma = cfg.gammas[g];
      for (const auto& rep : results) {
        const auto& cp = rep.checkpoints.at(k);
        if (cp.region_ok) {
          ++cell.usable;
          cell.covered += cp.covered[g];
        } else {
          ++cell.failed;
        }
      }
      table.cells.push_back(cell);
    }
  return table;
}

std::vector<std::pair<int, int>> sigma_cell_order(int d) {
  std::vector<std::pair<int, int>> order;
  for (int i = 0; i < d; ++i) order.emplace_back(i, i);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) order.emplace_back(i, j);
  return order;
}

std::string sigma_cell_label(int i, int j) {
  return "S" + std::to_string(i + 1) + std::to_string(j + 1);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_coverage_csv(std::ostream& os, const CoverageTable& table) {
  os << "n,gamma,covered,usable,failed,coverage\n";
  for (const auto& c : table.cells) {
    os << c.n << ',' << format_double(c.gamma) << ',' << c.covered << ',' << c.usable << ','
       << c.failed << ',';
    // empty (not zero) when no replicate was usable
    if (c.usable > 0)
      os << format_double(static_cast<double>(c.covered) / static_cast<double>(c.usable));
    os << '\n';
  }
}

void write_replicates_csv(std::ostream& os, const ExperimentConfig& cfg,
                          const std::vector<ReplicateResult>& results) {
  const int d = cfg.model.family.dim();
  const auto cells = sigma_cell_order(d);
  os << "replicate,n,status,t_n,min_site,grad_norm";
  for (int i = 0; i < d; ++i) os << ",theta_hat_" << (i + 1);
  for (const auto& [i, j] : cells) os << ',' << sigma_cell_label(i, j);
  for (const double g : cfg.gammas) os << ",covered_" << format_double(g);
  os << '\n';
  for (const auto& rep : results)
    for (const auto& cp : rep.checkpoints) {
      os << rep.replicate << ',' << cp.n << ',' << opt_status_name(cp.status);
      if (cp.simulated) {
        os << ',' << cp.t_n << ',' << cp.min_site << ',' << format_double(cp.grad_norm);
        for (int i = 0; i < d; ++i) os << ',' << format_double(cp.theta_hat[i]);
        for (const auto& [i, j] : cells) os << ',' << format_double(cp.sigma_hat.at(i, j));
      } else {
        for (std::size_t i = 0; i < 3 + static_cast<std::size_t>(d) + cells.size(); ++i)
          os << ',';
      }
      for (std::size_t g = 0; g < cfg.gammas.size(); ++g) {
        os << ',';
        if (cp.region_ok) os << cp.covered[g];
      }
      os << '\n';
    }
}

void write_boxplot_csv(std::ostream& os, const ExperimentConfig& cfg,
                       const std::vector<ReplicateResult>& results) {
  const auto cells = sigma_cell_order(cfg.model.family.dim());
  os << "replicate,n,cell,value\n";
  for (const auto& rep : results)
    for (const auto& cp : rep.checkpoints) {
      if (!cp.region_ok) continue;  // failed replicates emit no rows
      for (const auto& [i, j] : cells)
        os << rep.replicate << ',' << cp.n << ',' << sigma_cell_label(i, j) << ','
           << format_double(cp.sigma_hat.at(i, j)) << '\n';
    }
}

nlohmann::json boxplot_summary(const ExperimentConfig& cfg,
                               const std::vector<ReplicateResult>& results) {
  int usable = 0, failed = 0;
  for (const auto& rep : results)
    for (const auto& cp : rep.checkpoints) (cp.region_ok ? usable : failed)++;
  nlohmann::json j;
  j["replicates"] = cfg.replicates;
  j["checkpoints"] = cfg.checkpoints.size();
  j["usable_replicate_checkpoints"] = usable;
  j["failed_replicate_checkpoints"] = failed;
  j["rows_per_usable_checkpoint"] = sigma_cell_order(cfg.model.family.dim()).size();
  return j;
}

nlohmann::json run_manifest(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["config"] = config_to_json(cfg);
  j["seed"] = cfg.master_seed;
  j["git_describe"] = RWRE_GIT_DESCRIBE;
  j["environment_sites"] = "lazy unbounded growth in blocks of 1024 (no fixed site floor)";
  return j;
}

}  // namespace rwre
