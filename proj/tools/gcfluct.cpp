// Command-line front end: Monte Carlo campaigns over the graph process,
// verification of the limit-process predictions, SDE sampling, and the
// appendix sweeps. Configuration is one JSON document; every subcommand
// accepts --config, --out and a --seed override.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gcfluct/analytic.hpp"
#include "gcfluct/appendixlab.hpp"
#include "gcfluct/graphproc.hpp"
#include "gcfluct/harness.hpp"
#include "gcfluct/rng.hpp"
#include "gcfluct/sde.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gcfluct;

namespace {

struct SdeConfig {
  double t0 = 1.5;
  double t1 = 3.0;
  double x0 = 0.0;
  std::int64_t steps = 10000;
  std::int64_t paths = 10000;
  std::int64_t samples = 100000;  // closed-form sample count
  std::string mode = "stochastic";
  std::uint64_t seed = 1;
};

struct AppendixConfig {
  std::vector<std::int64_t> n = {150, 300, 600};
  std::vector<double> y = {3.0};
  std::int64_t k_max = 3;
  std::vector<double> ld_y = {1.5, 2.0, 3.0};
};

struct ToolConfig {
  harness::CampaignConfig campaign;
  harness::TolerancePolicy tolerance;
  SdeConfig sde;
  AppendixConfig appendix;
};

ToolConfig load_config(const std::string& path) {
  ToolConfig cfg;
  if (path.empty()) return cfg;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  json j = json::parse(buffer.str());

  if (j.contains("campaign")) {
    cfg.campaign = harness::CampaignConfig::from_json(j["campaign"].dump());
  }
  if (j.contains("tolerance")) {
    cfg.tolerance.se_units = j["tolerance"].value("se_units", cfg.tolerance.se_units);
    cfg.tolerance.rel_floor = j["tolerance"].value("rel_floor", cfg.tolerance.rel_floor);
  }
  if (j.contains("sde")) {
    const auto& s = j["sde"];
    cfg.sde.t0 = s.value("t0", cfg.sde.t0);
    cfg.sde.t1 = s.value("t1", cfg.sde.t1);
    cfg.sde.x0 = s.value("x0", cfg.sde.x0);
    cfg.sde.steps = s.value("steps", cfg.sde.steps);
    cfg.sde.paths = s.value("paths", cfg.sde.paths);
    cfg.sde.samples = s.value("samples", cfg.sde.samples);
    cfg.sde.mode = s.value("mode", cfg.sde.mode);
    cfg.sde.seed = s.value("seed", cfg.sde.seed);
  }
  if (j.contains("appendix")) {
    const auto& a = j["appendix"];
    if (a.contains("n")) cfg.appendix.n = a["n"].get<std::vector<std::int64_t>>();
    if (a.contains("y")) cfg.appendix.y = a["y"].get<std::vector<double>>();
    cfg.appendix.k_max = a.value("k_max", cfg.appendix.k_max);
    if (a.contains("ld_y")) cfg.appendix.ld_y = a["ld_y"].get<std::vector<double>>();
  }
  return cfg;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_campaign_outputs(const fs::path& out_dir, const harness::CampaignConfig& cfg,
                            const harness::MCStats& stats) {
  {
    std::ofstream out(out_dir / "mean.csv");
    stats.write_mean_csv(out);
  }
  {
    std::ofstream out(out_dir / "cov.csv");
    stats.write_cov_csv(out);
  }
  {
    std::ofstream out(out_dir / "zvar.csv");
    stats.write_zvar_csv(out);
  }
  write_file(out_dir / "campaign_config.json", cfg.to_json());
}

int cmd_simulate(const ToolConfig& cfg, const fs::path& out_dir) {
  auto stats = harness::run_campaign(cfg.campaign);
  write_campaign_outputs(out_dir, cfg.campaign, stats);

  // one sample realization for plotting
  auto stream = graphproc::sample_edge_stream(cfg.campaign.n, cfg.campaign.t1,
                                              mix_seed(cfg.campaign.master_seed, 0));
  auto traj = graphproc::trajectory(stream, cfg.campaign.make_grid());
  auto path = graphproc::fluctuation_path(traj);
  std::ofstream traj_out(out_dir / "trajectory0.csv");
  graphproc::write_csv(traj_out, traj, path);

  std::cout << "simulate: n=" << cfg.campaign.n << " R=" << cfg.campaign.replications
            << " grid=" << stats.grid().size() << " points -> " << out_dir << "\n";
  return 0;
}

int cmd_verify(const ToolConfig& cfg, const fs::path& out_dir) {
  std::vector<std::vector<double>> raw;
  auto stats = harness::run_campaign(cfg.campaign, &raw);
  write_campaign_outputs(out_dir, cfg.campaign, stats);

  auto cov_report = harness::verify_covariance(stats, cfg.tolerance);
  auto inc_report = harness::verify_brownian_increments(stats, cfg.tolerance);

  json report;
  report["covariance"] = json::parse(cov_report.to_json());
  report["brownian_increments"] = json::parse(inc_report.to_json());

  bool all_pass = cov_report.all_pass && inc_report.all_pass;
  report["ks_normality"] = json::array();
  for (std::size_t k = 0; k < stats.grid().size(); ++k) {
    std::vector<double> samples;
    samples.reserve(raw.size());
    for (const auto& x : raw) samples.push_back(x[k]);
    auto ks = harness::ks_normality(samples);
    json entry;
    entry["t"] = stats.grid()[k];
    entry["statistic"] = ks.statistic;
    entry["critical"] = ks.critical;
    entry["decision"] = ks.reject ? "fail" : "pass";
    report["ks_normality"].push_back(entry);
    all_pass = all_pass && !ks.reject;
  }

  std::vector<double> all_x;
  for (const auto& x : raw) all_x.insert(all_x.end(), x.begin(), x.end());
  auto tail = appendixlab::tail_check(all_x, cfg.campaign.n, 0.2);
  report["tail_check"] = {{"gamma", tail.gamma},
                          {"threshold", tail.threshold},
                          {"sample_size", tail.sample_size},
                          {"exceedances", tail.exceedances},
                          {"decision", tail.exceedances == 0 ? "pass" : "fail"}};
  all_pass = all_pass && tail.exceedances == 0;

  report["all_pass"] = all_pass;
  write_file(out_dir / "report.json", report.dump(2));

  std::cout << "verify: " << (all_pass ? "PASS" : "FAIL") << " -> "
            << (out_dir / "report.json") << "\n";
  return all_pass ? 0 : 1;
}

int cmd_sde(const ToolConfig& cfg, const fs::path& out_dir) {
  const auto& sc = cfg.sde;
  sde::Mode mode = sc.mode == "deterministic" ? sde::Mode::deterministic : sde::Mode::stochastic;

  Rng rng(sc.seed);
  auto path = sde::euler_maruyama(sc.t0, sc.t1, sc.x0, sc.steps, mode, rng);
  std::ofstream path_out(out_dir / "euler_path.csv");
  sde::write_csv(path_out, path);

  json report;
  report["mode"] = sc.mode;
  bool all_pass = true;

  if (mode == sde::Mode::stochastic) {
    // marginal variance of the Euler scheme against sigma^2(t1)
    const double sigma2_start = analytic::scaling(sc.t0).sigma2;
    const double sigma2_end = analytic::scaling(sc.t1).sigma2;
    sde::EulerIntegrator integrator(sc.t0, sc.t1, sc.steps, mode);
    double sum = 0.0, sum2 = 0.0;
    for (std::int64_t i = 0; i < sc.paths; ++i) {
      double x0 = std::sqrt(sigma2_start) * rng.normal();
      double x = integrator.run_final(x0, rng);
      sum += x;
      sum2 += x * x;
    }
    double mean = sum / static_cast<double>(sc.paths);
    double var = (sum2 - static_cast<double>(sc.paths) * mean * mean) /
                 static_cast<double>(sc.paths - 1);
    bool pass = std::abs(var - sigma2_end) / sigma2_end <= 0.05;
    report["euler_variance"] = {{"paths", sc.paths},
                                {"steps", sc.steps},
                                {"empirical", var},
                                {"theoretical", sigma2_end},
                                {"decision", pass ? "pass" : "fail"}};
    all_pass = all_pass && pass;
  } else {
    double exact = analytic::scaling(sc.t0).u / analytic::scaling(sc.t1).u * sc.x0;
    bool pass = std::abs(path.values.back() - exact) <= 1e-4 * std::max(1.0, std::abs(exact));
    report["euler_ode_limit"] = {{"empirical", path.values.back()},
                                 {"theoretical", exact},
                                 {"decision", pass ? "pass" : "fail"}};
    all_pass = all_pass && pass;
  }

  // closed-form sampler against the covariance kernel on the campaign grid
  harness::CampaignConfig grid_cfg = cfg.campaign;
  grid_cfg.t0 = sc.t0;
  grid_cfg.t1 = sc.t1;
  auto grid = grid_cfg.make_grid();
  harness::MCStats stats(grid);
  std::vector<double> x(grid.size());
  auto sample_path = sde::closed_form_sample(grid, rng);  // one path for plotting
  std::ofstream cf_out(out_dir / "closed_form_path.csv");
  sde::write_csv(cf_out, sample_path);
  for (std::int64_t i = 0; i < sc.samples; ++i) {
    auto p = sde::closed_form_sample(grid, rng);
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = p.values[k];
    stats.add(x);
  }
  auto cov_report = harness::verify_covariance(stats, cfg.tolerance);
  auto inc_report = harness::verify_brownian_increments(stats, cfg.tolerance);
  report["closed_form_covariance"] = json::parse(cov_report.to_json());
  report["closed_form_increments"] = json::parse(inc_report.to_json());
  all_pass = all_pass && cov_report.all_pass && inc_report.all_pass;

  report["all_pass"] = all_pass;
  write_file(out_dir / "sde_report.json", report.dump(2));
  std::cout << "sde: " << (all_pass ? "PASS" : "FAIL") << " -> "
            << (out_dir / "sde_report.json") << "\n";
  return all_pass ? 0 : 1;
}

int cmd_appendix(const ToolConfig& cfg, const fs::path& out_dir) {
  {
    std::ofstream sweep(out_dir / "appendix_sweep.csv");
    appendixlab::write_sweep_csv(sweep, cfg.appendix.n, cfg.appendix.y, cfg.appendix.k_max);
  }
  {
    std::ofstream ld(out_dir / "ld_functions.csv");
    ld << "x,y,delta,phi,psi\n";
    char buf[200];
    for (double y : cfg.appendix.ld_y) {
      for (int i = 1; i <= 19; ++i) {
        double x = 0.05 * i;
        auto f = appendixlab::ld_functions(x, y);
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n", f.x, f.y, f.delta,
                      f.phi, f.psi);
        ld << buf;
      }
    }
  }
  std::cout << "appendix: sweeps -> " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"giant-component fluctuation laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir_str = ".";
  std::optional<std::uint64_t> seed_override;

  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--out", out_dir_str, "output directory");
  app.add_option("--seed", seed_override, "override the master seed");

  auto* simulate = app.add_subcommand("simulate", "run a campaign, write CSV statistics");
  auto* verify = app.add_subcommand(
      "verify", "run a campaign and verify covariance, increments, normality, tails");
  auto* sde_cmd = app.add_subcommand("sde", "integrate the SDE and sample the limit process");
  auto* appendix = app.add_subcommand("appendix", "connectivity and component-count sweeps");

  CLI11_PARSE(app, argc, argv);

  try {
    ToolConfig cfg = load_config(config_path);
    if (seed_override) {
      cfg.campaign.master_seed = *seed_override;
      cfg.sde.seed = *seed_override;
    }
    fs::path out_dir(out_dir_str);
    fs::create_directories(out_dir);

    if (simulate->parsed()) return cmd_simulate(cfg, out_dir);
    if (verify->parsed()) return cmd_verify(cfg, out_dir);
    if (sde_cmd->parsed()) return cmd_sde(cfg, out_dir);
    if (appendix->parsed()) return cmd_appendix(cfg, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
