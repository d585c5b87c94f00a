#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gcfluct/analytic.hpp"
#include "gcfluct/harness.hpp"
#include "gcfluct/rng.hpp"
#include "gcfluct/sde.hpp"
#include "test_util.hpp"

using namespace gcfluct;

namespace {

// closed-form-fed accumulator: the sampler is exact in law, so every
// verifier must pass against it
harness::MCStats closed_form_stats(const std::vector<double>& grid, int samples,
                                   std::uint64_t seed, double scale_x = 1.0) {
  harness::MCStats stats(grid);
  Rng rng(seed);
  std::vector<double> x(grid.size());
  for (int i = 0; i < samples; ++i) {
    auto p = sde::closed_form_sample(grid, rng);
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = scale_x * p.values[k];
    stats.add(x);
  }
  return stats;
}

}  // namespace

TEST_CASE("config: validation") {
  harness::CampaignConfig cfg;
  cfg.n = 100;
  cfg.replications = 2;
  cfg.validate();

  harness::CampaignConfig bad = cfg;
  bad.replications = 1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.t0 = 0.9;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.t1 = 1.2;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.n = 2;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.grid = {2.0, 1.7};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("config: json round trip preserves every field") {
  harness::CampaignConfig cfg;
  cfg.n = 1234;
  cfg.t0 = 1.4;
  cfg.t1 = 2.9;
  cfg.grid_points = 5;
  cfg.replications = 77;
  cfg.master_seed = 987654321;
  cfg.workers = 3;
  auto parsed = harness::CampaignConfig::from_json(cfg.to_json());
  CHECK(parsed.n == cfg.n);
  CHECK(parsed.t0 == cfg.t0);
  CHECK(parsed.t1 == cfg.t1);
  CHECK(parsed.grid_points == cfg.grid_points);
  CHECK(parsed.replications == cfg.replications);
  CHECK(parsed.master_seed == cfg.master_seed);
  CHECK(parsed.workers == cfg.workers);
}

TEST_CASE("config: v-uniform grid placement") {
  harness::CampaignConfig cfg;
  cfg.n = 1000;
  cfg.grid_points = 6;
  auto grid = cfg.make_grid();
  REQUIRE(grid.size() == 6);
  CHECK(grid.front() == cfg.t0);
  CHECK(grid.back() == cfg.t1);
  double v0 = analytic::scaling(cfg.t0).v;
  double v1 = analytic::scaling(cfg.t1).v;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double expected = v0 + (v1 - v0) * static_cast<double>(k) / 5.0;
    CHECK(analytic::scaling(grid[k]).v == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("mcstats: mean and covariance against direct formulas") {
  std::vector<double> grid{1.5, 2.0, 2.5};
  harness::MCStats stats(grid);
  Rng rng(42);
  std::vector<std::vector<double>> data;
  for (int i = 0; i < 200; ++i) {
    std::vector<double> x{rng.normal(), 0.5 * rng.normal(), rng.uniform01()};
    data.push_back(x);
    stats.add(x);
  }
  CHECK(stats.count() == 200);
  for (int a = 0; a < 3; ++a) {
    double mean = 0.0;
    for (const auto& x : data) mean += x[static_cast<std::size_t>(a)];
    mean /= 200.0;
    CHECK(stats.mean()[static_cast<std::size_t>(a)] == doctest::Approx(mean).epsilon(1e-12));
    for (int b = a; b < 3; ++b) {
      double meanb = 0.0;
      for (const auto& x : data) meanb += x[static_cast<std::size_t>(b)];
      meanb /= 200.0;
      double cov = 0.0;
      for (const auto& x : data) {
        cov += (x[static_cast<std::size_t>(a)] - mean) * (x[static_cast<std::size_t>(b)] - meanb);
      }
      cov /= 199.0;
      CHECK(stats.cov(a, b) == doctest::Approx(cov).epsilon(1e-10));
      CHECK(stats.cov(a, b) == stats.cov(b, a));
    }
  }
}

TEST_CASE("mcstats: jackknife matches brute-force delete-one recomputation") {
  std::vector<double> grid{1.5, 2.2};
  harness::MCStats stats(grid);
  Rng rng(7);
  const int r = 60;
  std::vector<std::vector<double>> data;
  for (int i = 0; i < r; ++i) {
    std::vector<double> x{rng.normal(), rng.normal() + 0.3 * rng.uniform01()};
    data.push_back(x);
    stats.add(x);
  }

  auto sample_cov = [&](const std::vector<int>& keep, int a, int b) {
    double ma = 0.0, mb = 0.0;
    for (int i : keep) {
      ma += data[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)];
      mb += data[static_cast<std::size_t>(i)][static_cast<std::size_t>(b)];
    }
    ma /= static_cast<double>(keep.size());
    mb /= static_cast<double>(keep.size());
    double c = 0.0;
    for (int i : keep) {
      c += (data[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] - ma) *
           (data[static_cast<std::size_t>(i)][static_cast<std::size_t>(b)] - mb);
    }
    return c / static_cast<double>(keep.size() - 1);
  };

  for (auto [a, b] : std::vector<std::pair<int, int>>{{0, 0}, {0, 1}, {1, 1}}) {
    std::vector<double> loo;
    for (int drop = 0; drop < r; ++drop) {
      std::vector<int> keep;
      for (int i = 0; i < r; ++i) {
        if (i != drop) keep.push_back(i);
      }
      loo.push_back(sample_cov(keep, a, b));
    }
    double mean = 0.0;
    for (double v : loo) mean += v;
    mean /= static_cast<double>(r);
    double jvar = 0.0;
    for (double v : loo) jvar += (v - mean) * (v - mean);
    jvar *= static_cast<double>(r - 1) / static_cast<double>(r);
    CHECK(stats.cov_jackknife_se(a, b) == doctest::Approx(std::sqrt(jvar)).epsilon(1e-9));
  }

  // z-increment variance jackknife against the same construction
  double u0 = analytic::scaling(grid[0]).u;
  double u1 = analytic::scaling(grid[1]).u;
  std::vector<double> d;
  for (const auto& x : data) d.push_back(u1 * x[1] - u0 * x[0]);
  std::vector<double> loo;
  for (int drop = 0; drop < r; ++drop) {
    double m = 0.0;
    for (int i = 0; i < r; ++i) {
      if (i != drop) m += d[static_cast<std::size_t>(i)];
    }
    m /= static_cast<double>(r - 1);
    double v = 0.0;
    for (int i = 0; i < r; ++i) {
      if (i != drop) {
        v += (d[static_cast<std::size_t>(i)] - m) * (d[static_cast<std::size_t>(i)] - m);
      }
    }
    loo.push_back(v / static_cast<double>(r - 2));
  }
  double mean = 0.0;
  for (double v : loo) mean += v;
  mean /= static_cast<double>(r);
  double jvar = 0.0;
  for (double v : loo) jvar += (v - mean) * (v - mean);
  jvar *= static_cast<double>(r - 1) / static_cast<double>(r);
  CHECK(stats.zvar_jackknife_se(0) == doctest::Approx(std::sqrt(jvar)).epsilon(1e-9));
}

TEST_CASE("mcstats: merge equals single-pass accumulation") {
  std::vector<double> grid{1.5, 2.0, 3.0};
  harness::MCStats whole(grid), left(grid), right(grid);
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> x{rng.normal(), rng.normal(), rng.normal()};
    whole.add(x);
    (i < 180 ? left : right).add(x);
  }
  left.merge(right);
  CHECK(left.count() == whole.count());
  for (int a = 0; a < 3; ++a) {
    CHECK(left.mean()[static_cast<std::size_t>(a)] ==
          doctest::Approx(whole.mean()[static_cast<std::size_t>(a)]).epsilon(1e-9));
    for (int b = a; b < 3; ++b) {
      CHECK(left.cov(a, b) == doctest::Approx(whole.cov(a, b)).epsilon(1e-9));
    }
  }
  for (int j = 0; j < 2; ++j) {
    CHECK(left.zvar(j) == doctest::Approx(whole.zvar(j)).epsilon(1e-9));
  }
}

TEST_CASE("mcstats: merge is commutative and associative to tolerance") {
  std::vector<double> grid{1.6, 2.4};
  Rng rng(13);
  auto make = [&](int count) {
    harness::MCStats s(grid);
    for (int i = 0; i < count; ++i) {
      std::vector<double> x{rng.normal(), rng.normal()};
      s.add(x);
    }
    return s;
  };
  auto a = make(50), b = make(75), c = make(33);

  auto ab_c = a;
  ab_c.merge(b);
  ab_c.merge(c);
  auto bc = b;
  bc.merge(c);
  auto a_bc = a;
  a_bc.merge(bc);
  auto ba = b;
  ba.merge(a);
  ba.merge(c);

  for (int i = 0; i < 2; ++i) {
    for (int j = i; j < 2; ++j) {
      CHECK(ab_c.cov(i, j) == doctest::Approx(a_bc.cov(i, j)).epsilon(1e-9));
      CHECK(ab_c.cov(i, j) == doctest::Approx(ba.cov(i, j)).epsilon(1e-9));
    }
  }
}

TEST_CASE("run_campaign: smallest legal campaign and precondition") {
  harness::CampaignConfig cfg;
  cfg.n = 100;
  cfg.replications = 2;
  cfg.grid_points = 3;
  auto stats = harness::run_campaign(cfg);
  CHECK(stats.count() == 2);
  CHECK(std::isfinite(stats.cov(0, 0)));

  cfg.replications = 1;
  CHECK_THROWS_AS(harness::run_campaign(cfg), std::invalid_argument);
}

TEST_CASE("run_campaign: bitwise identical across worker counts") {
  harness::CampaignConfig cfg;
  cfg.n = 300;
  cfg.replications = 128;
  cfg.grid_points = 4;
  cfg.master_seed = 2718;

  cfg.workers = 1;
  std::vector<std::vector<double>> raw1;
  auto s1 = harness::run_campaign(cfg, &raw1);
  cfg.workers = 8;
  std::vector<std::vector<double>> raw8;
  auto s8 = harness::run_campaign(cfg, &raw8);

  REQUIRE(raw1.size() == raw8.size());
  for (std::size_t r = 0; r < raw1.size(); ++r) {
    REQUIRE(raw1[r].size() == raw8[r].size());
    for (std::size_t k = 0; k < raw1[r].size(); ++k) CHECK(raw1[r][k] == raw8[r][k]);
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = i; j < 4; ++j) CHECK(s1.cov(i, j) == s8.cov(i, j));
  }
  CHECK(harness::verify_covariance(s1).to_json() == harness::verify_covariance(s8).to_json());
}

TEST_CASE("run_campaign: oversize request raises a sizing error") {
  harness::CampaignConfig cfg;
  cfg.n = 100'000'000;
  cfg.t1 = 3.0;
  cfg.replications = 2;
  CHECK_THROWS_AS(harness::run_campaign(cfg), std::length_error);
}

TEST_CASE("verify_covariance: closed-form-fed stats pass, scaled stats fail") {
  std::vector<double> grid{1.5, 2.0, 2.5, 3.0};
  auto stats = closed_form_stats(grid, 100000, 31415);
  auto report = harness::verify_covariance(stats);
  CHECK(report.all_pass);
  CHECK(report.entries.size() == 10);

  // diagonal entry at t = 2 against the frozen variance
  bool found = false;
  for (const auto& e : report.entries) {
    if (e.pair_s == 2.0 && e.pair_t == 2.0) {
      CHECK(e.theoretical == doctest::Approx(0.45944172300703756).epsilon(1e-12));
      found = true;
    }
  }
  CHECK(found);

  // fault injection: scaling all X by 1.2 inflates the covariance by 44%
  auto scaled = closed_form_stats(grid, 100000, 31415, 1.2);
  CHECK_FALSE(harness::verify_covariance(scaled).all_pass);
}

TEST_CASE("verify_brownian_increments: closed-form-fed stats pass, doubled z fails") {
  std::vector<double> grid{1.5, 2.0, 2.5, 3.0};
  auto stats = closed_form_stats(grid, 100000, 2025);
  auto report = harness::verify_brownian_increments(stats);
  CHECK(report.all_pass);
  CHECK(report.entries.size() == 3);

  auto doubled = closed_form_stats(grid, 100000, 2025, 2.0);  // doubles Z = uX
  CHECK_FALSE(harness::verify_brownian_increments(doubled).all_pass);
}

TEST_CASE("verify_brownian_increments: single-point grid passes vacuously") {
  std::vector<double> grid{2.0};
  auto stats = closed_form_stats(grid, 150, 8);
  auto report = harness::verify_brownian_increments(stats);
  CHECK(report.entries.empty());
  CHECK(report.all_pass);
}

TEST_CASE("verify: refuses tiny sample counts") {
  std::vector<double> grid{1.5, 2.0};
  auto stats = closed_form_stats(grid, 99, 5);
  CHECK_THROWS_AS(harness::verify_covariance(stats), std::invalid_argument);
  CHECK_THROWS_AS(harness::verify_brownian_increments(stats), std::invalid_argument);
}

TEST_CASE("verify report: json schema") {
  std::vector<double> grid{1.5, 2.5};
  auto stats = closed_form_stats(grid, 1000, 17);
  auto text = harness::verify_covariance(stats).to_json();
  CHECK(text.find("\"pair\"") != std::string::npos);
  CHECK(text.find("\"empirical\"") != std::string::npos);
  CHECK(text.find("\"theoretical\"") != std::string::npos);
  CHECK(text.find("\"se\"") != std::string::npos);
  CHECK(text.find("\"decision\"") != std::string::npos);
}

TEST_CASE("ks: single sample against the normal cdf, no standardization") {
  std::vector<double> one{0.0};
  CHECK(harness::ks_statistic(one, testutil::normal_cdf) == doctest::Approx(0.5));
}

TEST_CASE("ks normality: calibrated under the null, rejects uniform") {
  Rng rng(271828);
  std::vector<double> normal_draws;
  for (int i = 0; i < 10000; ++i) normal_draws.push_back(rng.normal());
  auto res = harness::ks_normality(normal_draws);
  CHECK(res.critical == doctest::Approx(1.63 / 100.0));
  CHECK_FALSE(res.reject);

  std::vector<double> uniform_draws;
  for (int i = 0; i < 10000; ++i) uniform_draws.push_back(-2.0 + 4.0 * rng.uniform01());
  auto res2 = harness::ks_normality(uniform_draws);
  CHECK(res2.reject);
  CHECK(res2.statistic > 0.04);  // sup |F_unif - Phi| ~ 0.06 after standardizing

  std::vector<double> few(99, 0.5);
  CHECK_THROWS_AS(harness::ks_normality(few), std::invalid_argument);
}
