// Command-line front end: simulate walks, estimate from left-step statistics,
// drive the companion chain, run coverage/boxplot replication experiments and
// the invariant check suites.
//
// Exit codes: 0 success, 2 configuration error, 3 invariant-suite failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rwre/bpire.hpp"
#include "rwre/diagnostics.hpp"
#include "rwre/env_models.hpp"
#include "rwre/errors.hpp"
#include "rwre/estimator.hpp"
#include "rwre/experiments.hpp"
#include "rwre/likelihood.hpp"
#include "rwre/rng.hpp"
#include "rwre/rwre_sim.hpp"

namespace {

using nlohmann::json;

rwre::EnvModel model_from_flags(const std::string& family_name,
                                const std::vector<double>& theta,
                                const std::vector<double>& atoms,
                                const std::vector<double>& box_flat) {
  const rwre::Family kind = rwre::family_from_name(family_name);
  rwre::ModelFamily family;
  family.kind = kind;
  family.box = rwre::default_box(kind);
  if (kind == rwre::Family::two_point_known) {
    if (atoms.size() != 2)
      throw std::invalid_argument("two_point_known needs --a A1 A2");
    family.a1 = atoms[0];
    family.a2 = atoms[1];
  } else if (!atoms.empty()) {
    throw std::invalid_argument("--a only applies to two_point_known");
  }
  const int d = family.dim();
  if (!box_flat.empty()) {
    if (box_flat.size() != static_cast<std::size_t>(2 * d))
      throw std::invalid_argument("--box needs lo hi per coordinate");
    for (int i = 0; i < d; ++i) {
      family.box.lo[i] = box_flat[static_cast<std::size_t>(2 * i)];
      family.box.hi[i] = box_flat[static_cast<std::size_t>(2 * i + 1)];
    }
  }
  rwre::SmallVec th(d);
  if (theta.size() != static_cast<std::size_t>(d))
    throw std::invalid_argument("--theta needs " + std::to_string(d) + " values");
  for (int i = 0; i < d; ++i) th[i] = theta[static_cast<std::size_t>(i)];
  return rwre::make_model(family, th);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  return os;
}

json report_to_json(const rwre::ModelFamily& family, const rwre::EstimateReport& report) {
  json j;
  j["family"] = rwre::family_name(family.kind);
  j["n"] = report.n;
  j["status"] = rwre::opt_status_name(report.status);
  j["grad_norm"] = report.grad_norm;
  j["value"] = report.value;
  j["theta_hat"] = json::array();
  for (int i = 0; i < report.theta_hat.d; ++i) j["theta_hat"].push_back(report.theta_hat[i]);
  j["sigma_hat"] = json::array();
  for (int i = 0; i < report.sigma_hat.d; ++i) {
    json row = json::array();
    for (int k = 0; k < report.sigma_hat.d; ++k) row.push_back(report.sigma_hat.at(i, k));
    j["sigma_hat"].push_back(row);
  }
  json regions;
  for (const auto& [gamma, region] : report.regions) {
    json r;
    r["available"] = region.available;
    r["threshold"] = region.threshold;
    if (region.d == 1 && region.available) r["half_width"] = region.half_width;
    regions[rwre::format_double(gamma)] = r;
  }
  j["regions"] = regions;
  return j;
}

std::vector<std::int64_t> read_l_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot read: " + path);
  std::vector<std::pair<std::int64_t, std::int64_t>> rows;
  std::string line;
  std::optional<std::int64_t> only_replicate;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (!line.empty() && (std::isalpha(static_cast<unsigned char>(line[0])))) continue;  // header
    std::istringstream ls(line);
    std::vector<std::int64_t> fields;
    std::string tok;
    while (std::getline(ls, tok, ',')) fields.push_back(std::stoll(tok));
    if (fields.size() == 2) {
      rows.emplace_back(fields[0], fields[1]);
    } else if (fields.size() == 3) {
      if (only_replicate && *only_replicate != fields[0])
        throw std::invalid_argument("L-stats file contains more than one replicate");
      only_replicate = fields[0];
      rows.emplace_back(fields[1], fields[2]);
    } else {
      throw std::invalid_argument("L-stats rows must be `x,l` or `replicate,x,l`");
    }
  }
  if (rows.empty()) throw std::invalid_argument("empty L-stats file");
  std::sort(rows.begin(), rows.end());
  std::vector<std::int64_t> L(rows.size(), 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].first != static_cast<std::int64_t>(i))
      throw std::invalid_argument("L-stats must cover sites 0..n exactly once");
    L[i] = rows[i].second;
  }
  return L;
}

struct CommonModelFlags {
  std::string family;
  std::vector<double> theta;
  std::vector<double> atoms;
  std::vector<double> box;

  void attach(CLI::App* cmd, bool need_theta = true) {
    cmd->add_option("--family", family, "two_point_known | two_point_free | beta")->required();
    auto* th = cmd->add_option("--theta", theta, "model parameters (d values)");
    if (need_theta) th->required();
    cmd->add_option("--a", atoms, "fixed support points a1 a2 (two_point_known)");
    cmd->add_option("--box", box, "optimization box, lo hi per coordinate");
  }
};

int cmd_simulate(const CommonModelFlags& mf, std::int64_t n, int replicates,
                 std::uint64_t seed, const std::string& mode, const std::string& out,
                 const std::string& l_out) {
  const rwre::EnvModel model = model_from_flags(mf.family, mf.theta, mf.atoms, mf.box);
  std::ostringstream csv, lcsv;
  csv << "replicate,t_n,min_site,sum_left\n";
  lcsv << "replicate,x,l\n";

  std::optional<rwre::QuenchedEnv> quenched;
  if (mode == "quenched") {
    rwre::Stream env_stream = rwre::substream(seed, 0, rwre::phase::environment);
    rwre::QuenchedEnv env;
    env.site_lo = -8192;
    env.omega = rwre::sample_environment(model, env.site_lo, n, env_stream);
    quenched = std::move(env);
  } else if (mode != "annealed") {
    throw std::invalid_argument("--mode must be annealed or quenched");
  }

  for (int r = 0; r < replicates; ++r) {
    const auto id = static_cast<std::uint64_t>(r);
    rwre::WalkRecord rec;
    if (quenched) {
      rec = rwre::run_to_hitting_quenched(model, n, *quenched,
                                          rwre::substream(seed, id, rwre::phase::walk));
    } else {
      rec = rwre::run_to_hitting(model, n, rwre::substream(seed, id, rwre::phase::environment),
                                 rwre::substream(seed, id, rwre::phase::walk));
    }
    csv << r << ',' << rec.hitting_time << ',' << rec.min_site << ',' << rec.sum_left() << '\n';
    if (!l_out.empty()) {
      const auto L = rwre::criterion_stats(rec);
      for (std::size_t x = 0; x < L.size(); ++x)
        lcsv << r << ',' << x << ',' << L[x] << '\n';
    }
  }

  if (out.empty()) {
    std::cout << csv.str();
  } else {
    open_out(out) << csv.str();
  }
  if (!l_out.empty()) open_out(l_out) << lcsv.str();
  return 0;
}

int cmd_estimate(const CommonModelFlags& mf, const std::string& l_csv, std::int64_t n,
                 std::uint64_t seed, const std::vector<double>& gammas,
                 const std::string& out) {
  const rwre::EnvModel model = model_from_flags(mf.family, mf.theta, mf.atoms, mf.box);
  std::vector<std::int64_t> L;
  if (!l_csv.empty()) {
    L = read_l_csv(l_csv);
  } else {
    if (n < 1) throw std::invalid_argument("need --l-csv or --n for an inline simulation");
    const rwre::WalkRecord rec =
        rwre::run_to_hitting(model, n, rwre::substream(seed, 0, rwre::phase::environment),
                             rwre::substream(seed, 0, rwre::phase::walk));
    L = rwre::criterion_stats(rec);
  }
  rwre::Stream opt_stream = rwre::substream(seed, 0, rwre::phase::optimizer);
  rwre::EstimateReport report = rwre::mle(model.family, L, opt_stream);
  for (const double g : gammas) report.regions[g] = rwre::confidence_region(report, g);

  const json j = report_to_json(model.family, report);
  if (out.empty())
    std::cout << j.dump(2) << '\n';
  else
    open_out(out) << j.dump(2) << '\n';
  return 0;
}

int cmd_bpire(const CommonModelFlags& mf, std::int64_t steps, std::uint64_t seed,
              const std::string& trace_out, const std::string& summary_out) {
  const rwre::EnvModel model = model_from_flags(mf.family, mf.theta, mf.atoms, mf.box);
  rwre::Stream stream = rwre::substream(seed, 0, rwre::phase::chain);
  const rwre::BpireTrace trace = rwre::simulate_chain(model, steps, stream);

  if (!trace_out.empty()) {
    auto os = open_out(trace_out);
    os << "k,z\n";
    for (std::size_t k = 0; k < trace.states.size(); ++k) os << k << ',' << trace.states[k] << '\n';
  }

  double mean = 0.0;
  for (const auto z : trace.states) mean += static_cast<double>(z);
  mean /= static_cast<double>(trace.states.size());
  double var = 0.0;
  for (const auto z : trace.states) {
    const double d = static_cast<double>(z) - mean;
    var += d * d;
  }
  var /= static_cast<double>(trace.states.size());

  json summary;
  summary["steps"] = steps;
  summary["mean"] = mean;
  summary["variance"] = var;
  summary["kernel_rows"] = json::array();
  for (int x = 0; x <= 10; ++x) {
    const rwre::KernelRow row = rwre::kernel_row(model, x, 1e-8);
    double sum = 0.0;
    for (const double p : row.probs) sum += p;
    json jr;
    jr["x"] = x;
    jr["row_sum"] = sum;
    jr["tail_mass"] = row.tail_mass;
    summary["kernel_rows"].push_back(jr);
  }
  if (summary_out.empty())
    std::cout << summary.dump(2) << '\n';
  else
    open_out(summary_out) << summary.dump(2) << '\n';
  return 0;
}

rwre::ExperimentConfig load_config(const std::string& path, std::optional<std::uint64_t> seed,
                                   std::optional<int> workers) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot read config: " + path);
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  rwre::ExperimentConfig cfg = rwre::config_from_json(j);
  if (seed) cfg.master_seed = *seed;
  if (workers) cfg.workers = *workers;
  return cfg;
}

int cmd_coverage(const rwre::ExperimentConfig& cfg, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const auto results = rwre::run_replicates(cfg);
  const rwre::CoverageTable table = rwre::aggregate_coverage(cfg, results);
  {
    auto os = open_out(out_dir + "/coverage.csv");
    rwre::write_coverage_csv(os, table);
  }
  {
    auto os = open_out(out_dir + "/replicates.csv");
    rwre::write_replicates_csv(os, cfg, results);
  }
  open_out(out_dir + "/manifest.json") << rwre::run_manifest(cfg).dump(2) << '\n';
  return 0;
}

int cmd_fisher_boxplots(const rwre::ExperimentConfig& cfg, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const auto results = rwre::run_replicates(cfg);
  {
    auto os = open_out(out_dir + "/boxplots.csv");
    rwre::write_boxplot_csv(os, cfg, results);
  }
  open_out(out_dir + "/boxplot_summary.json")
      << rwre::boxplot_summary(cfg, results).dump(2) << '\n';
  open_out(out_dir + "/manifest.json") << rwre::run_manifest(cfg).dump(2) << '\n';
  return 0;
}

int cmd_check() {
  const auto suites = rwre::run_all_checks();
  bool all = true;
  for (const auto& s : suites) {
    std::cout << (s.passed ? "PASS " : "FAIL ") << s.name << " (" << s.detail << ")\n";
    all = all && s.passed;
  }
  return all ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ballistic random walks in random i.i.d. environments: simulation, "
               "likelihood inference and coverage experiments"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "walk to a hitting time, emit per-replicate stats");
  CommonModelFlags sim_mf;
  sim_mf.attach(sim);
  std::int64_t sim_n = 1000;
  int sim_reps = 1;
  std::uint64_t sim_seed = 1;
  std::string sim_mode = "annealed", sim_out, sim_l_out;
  sim->add_option("--n", sim_n, "target site")->required();
  sim->add_option("--replicates", sim_reps, "independent replicates");
  sim->add_option("--seed", sim_seed, "master seed");
  sim->add_option("--mode", sim_mode, "annealed | quenched");
  sim->add_option("--out", sim_out, "summary CSV path (default stdout)");
  sim->add_option("--l-out", sim_l_out, "optional long-format left-step counts CSV");

  // estimate
  auto* est = app.add_subcommand("estimate", "maximize the criterion, emit a JSON report");
  CommonModelFlags est_mf;
  est_mf.attach(est);
  std::string est_l_csv, est_out;
  std::int64_t est_n = 0;
  std::uint64_t est_seed = 1;
  std::vector<double> est_gammas = {0.01, 0.05, 0.1};
  est->add_option("--l-csv", est_l_csv, "left-step counts (x,l rows); otherwise simulate inline");
  est->add_option("--n", est_n, "inline simulation target site");
  est->add_option("--seed", est_seed, "master seed");
  est->add_option("--gamma-list", est_gammas, "confidence levels gamma");
  est->add_option("--out", est_out, "report path (default stdout)");

  // bpire
  auto* bp = app.add_subcommand("bpire", "simulate the companion branching chain");
  CommonModelFlags bp_mf;
  bp_mf.attach(bp);
  std::int64_t bp_steps = 10000;
  std::uint64_t bp_seed = 1;
  std::string bp_trace, bp_summary;
  bp->add_option("--steps", bp_steps, "transitions to simulate");
  bp->add_option("--seed", bp_seed, "master seed");
  bp->add_option("--trace-out", bp_trace, "state trace CSV path");
  bp->add_option("--summary-out", bp_summary, "summary JSON path (default stdout)");

  // coverage / fisher-boxplots
  std::string cov_config, cov_out = ".";
  std::optional<std::uint64_t> cov_seed;
  std::optional<int> cov_workers;
  auto* cov = app.add_subcommand("coverage", "replicated confidence-region coverage experiment");
  cov->add_option("--config", cov_config, "experiment config JSON")->required();
  cov->add_option("--seed", cov_seed, "override the config seed");
  cov->add_option("--workers", cov_workers, "worker threads (1 = serial)");
  cov->add_option("--out", cov_out, "output directory");

  std::string fb_config, fb_out = ".";
  std::optional<std::uint64_t> fb_seed;
  std::optional<int> fb_workers;
  auto* fb = app.add_subcommand("fisher-boxplots",
                                "long-format observed-information entries per replicate");
  fb->add_option("--config", fb_config, "experiment config JSON")->required();
  fb->add_option("--seed", fb_seed, "override the config seed");
  fb->add_option("--workers", fb_workers, "worker threads (1 = serial)");
  fb->add_option("--out", fb_out, "output directory");

  auto* chk = app.add_subcommand("check", "run the invariant suites (CI hook)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sim->parsed())
      return cmd_simulate(sim_mf, sim_n, sim_reps, sim_seed, sim_mode, sim_out, sim_l_out);
    if (est->parsed())
      return cmd_estimate(est_mf, est_l_csv, est_n, est_seed, est_gammas, est_out);
    if (bp->parsed()) return cmd_bpire(bp_mf, bp_steps, bp_seed, bp_trace, bp_summary);
    if (cov->parsed()) return cmd_coverage(load_config(cov_config, cov_seed, cov_workers), cov_out);
    if (fb->parsed())
      return cmd_fisher_boxplots(load_config(fb_config, fb_seed, fb_workers), fb_out);
    if (chk->parsed()) return cmd_check();
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
