#include "gcfluct/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "gcfluct/analytic.hpp"
#include "gcfluct/graphproc.hpp"
#include "gcfluct/rng.hpp"

namespace gcfluct::harness {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

void write_row(std::ostream& out, std::span<const double> values) {
  char buf[40];
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", values[i]);
    out << buf << (i + 1 < values.size() ? "," : "\n");
  }
}

}  // namespace

void CampaignConfig::validate() const {
  if (!(t0 > 1.0) || !(t1 > t0)) {
    throw std::invalid_argument("campaign: need 1 < t0 < t1");
  }
  if (!(t1 < static_cast<double>(n))) {
    throw std::invalid_argument("campaign: need t1 < n");
  }
  if (replications < 2) {
    throw std::invalid_argument("campaign: need at least 2 replications (variance undefined)");
  }
  if (grid.empty() && grid_points < 1) {
    throw std::invalid_argument("campaign: need at least one grid point");
  }
  if (!grid.empty()) {
    double prev = 1.0;
    for (double t : grid) {
      if (!(t > prev)) throw std::invalid_argument("campaign: explicit grid must be > 1, increasing");
      prev = t;
    }
    if (grid.back() > t1) throw std::invalid_argument("campaign: explicit grid exceeds t1");
  }
  if (workers < 1) throw std::invalid_argument("campaign: need workers >= 1");
}

std::vector<double> CampaignConfig::make_grid() const {
  if (!grid.empty()) return grid;
  const double v0 = analytic::scaling(t0).v;
  const double v1 = analytic::scaling(t1).v;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(grid_points));
  if (grid_points == 1) {
    out.push_back(analytic::v_inverse(0.5 * (v0 + v1)));
    return out;
  }
  for (int k = 0; k < grid_points; ++k) {
    if (k == 0) {
      out.push_back(t0);
    } else if (k == grid_points - 1) {
      out.push_back(t1);
    } else {
      double v = v0 + (v1 - v0) * static_cast<double>(k) / (grid_points - 1);
      out.push_back(analytic::v_inverse(v));
    }
  }
  return out;
}

std::string CampaignConfig::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["t0"] = t0;
  j["t1"] = t1;
  j["grid_points"] = grid_points;
  if (!grid.empty()) j["grid"] = grid;
  j["replications"] = replications;
  j["master_seed"] = master_seed;
  j["workers"] = workers;
  return j.dump(2);
}

CampaignConfig CampaignConfig::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  CampaignConfig cfg;
  cfg.n = j.value("n", cfg.n);
  cfg.t0 = j.value("t0", cfg.t0);
  cfg.t1 = j.value("t1", cfg.t1);
  cfg.grid_points = j.value("grid_points", cfg.grid_points);
  if (j.contains("grid")) cfg.grid = j["grid"].get<std::vector<double>>();
  cfg.replications = j.value("replications", cfg.replications);
  cfg.master_seed = j.value("master_seed", cfg.master_seed);
  cfg.workers = j.value("workers", cfg.workers);
  return cfg;
}

int MCStats::product_index(int i, int j) const {
  if (i > j) std::swap(i, j);
  // offset of pair (i,j), i <= j, in row-major upper-triangular order
  return points() + i * points() - i * (i - 1) / 2 + (j - i);
}

int MCStats::zinc_index(int j) const {
  int g = points();
  return g + g * (g + 1) / 2 + j;
}

int MCStats::zinc_sq_index(int j) const { return zinc_index(j) + (points() - 1); }

MCStats::MCStats(std::vector<double> tgrid) : tgrid_(std::move(tgrid)) {
  if (tgrid_.empty()) throw std::invalid_argument("MCStats: empty grid");
  double prev = 1.0;
  for (double t : tgrid_) {
    if (!(t > prev)) throw std::invalid_argument("MCStats: grid must be > 1 and increasing");
    prev = t;
  }
  vgrid_.reserve(tgrid_.size());
  ugrid_.reserve(tgrid_.size());
  for (double t : tgrid_) {
    auto b = analytic::scaling(t);
    vgrid_.push_back(b.v);
    ugrid_.push_back(b.u);
  }
  int g = points();
  dim_ = g + g * (g + 1) / 2 + 2 * (g - 1);
  mean_.assign(static_cast<std::size_t>(dim_), 0.0L);
  m2_.assign(static_cast<std::size_t>(dim_) * dim_, 0.0L);
  ybuf_.resize(static_cast<std::size_t>(dim_));
  dbuf_.resize(static_cast<std::size_t>(dim_));
}

void MCStats::add(std::span<const double> x) {
  int g = points();
  if (static_cast<int>(x.size()) != g) {
    throw std::invalid_argument("MCStats::add: observation size does not match grid");
  }
  for (int i = 0; i < g; ++i) ybuf_[static_cast<std::size_t>(i)] = x[i];
  for (int i = 0; i < g; ++i) {
    for (int j = i; j < g; ++j) {
      ybuf_[static_cast<std::size_t>(product_index(i, j))] = x[i] * x[j];
    }
  }
  for (int j = 0; j + 1 < g; ++j) {
    double d = ugrid_[j + 1] * x[j + 1] - ugrid_[j] * x[j];
    ybuf_[static_cast<std::size_t>(zinc_index(j))] = d;
    ybuf_[static_cast<std::size_t>(zinc_sq_index(j))] = d * d;
  }

  ++count_;
  const auto cnt = static_cast<long double>(count_);
  // Welford: deltas against the old mean, then M2 += outer(d, d) (cnt-1)/cnt
  for (int a = 0; a < dim_; ++a) {
    dbuf_[static_cast<std::size_t>(a)] =
        static_cast<long double>(ybuf_[static_cast<std::size_t>(a)]) -
        mean_[static_cast<std::size_t>(a)];
    mean_[static_cast<std::size_t>(a)] += dbuf_[static_cast<std::size_t>(a)] / cnt;
  }
  const long double scale = (cnt - 1.0L) / cnt;
  for (int a = 0; a < dim_; ++a) {
    const long double da = dbuf_[static_cast<std::size_t>(a)] * scale;
    for (int b = a; b < dim_; ++b) {
      long double upd = da * dbuf_[static_cast<std::size_t>(b)];
      m2_[static_cast<std::size_t>(a) * dim_ + b] += upd;
      if (a != b) m2_[static_cast<std::size_t>(b) * dim_ + a] += upd;
    }
  }
}

void MCStats::merge(const MCStats& other) {
  if (other.tgrid_ != tgrid_) throw std::invalid_argument("MCStats::merge: grids differ");
  if (other.count_ == 0) return;
  if (count_ == 0) {
    count_ = other.count_;
    mean_ = other.mean_;
    m2_ = other.m2_;
    return;
  }
  const auto na = static_cast<long double>(count_);
  const auto nb = static_cast<long double>(other.count_);
  const long double nab = na + nb;
  for (int a = 0; a < dim_; ++a) {
    long double delta_a = other.mean_[static_cast<std::size_t>(a)] - mean_[static_cast<std::size_t>(a)];
    for (int b = a; b < dim_; ++b) {
      long double delta_b =
          other.mean_[static_cast<std::size_t>(b)] - mean_[static_cast<std::size_t>(b)];
      long double upd = other.m2_[static_cast<std::size_t>(a) * dim_ + b] +
                        delta_a * delta_b * na * nb / nab;
      m2_[static_cast<std::size_t>(a) * dim_ + b] += upd;
      if (a != b) m2_[static_cast<std::size_t>(b) * dim_ + a] += upd;
    }
  }
  for (int a = 0; a < dim_; ++a) {
    mean_[static_cast<std::size_t>(a)] += (other.mean_[static_cast<std::size_t>(a)] -
                                           mean_[static_cast<std::size_t>(a)]) *
                                          nb / nab;
  }
  count_ += other.count_;
}

std::vector<double> MCStats::mean() const {
  std::vector<double> out(static_cast<std::size_t>(points()));
  for (int i = 0; i < points(); ++i) out[static_cast<std::size_t>(i)] = static_cast<double>(mean_[static_cast<std::size_t>(i)]);
  return out;
}

double MCStats::cov(int i, int j) const {
  if (count_ < 2) throw std::logic_error("MCStats::cov: need at least 2 observations");
  return static_cast<double>(central2(i, j) / static_cast<long double>(count_ - 1));
}

double MCStats::zvar(int j) const {
  if (count_ < 2) throw std::logic_error("MCStats::zvar: need at least 2 observations");
  int a = zinc_index(j);
  return static_cast<double>(central2(a, a) / static_cast<long double>(count_ - 1));
}

// Exact delete-one jackknife of the sample covariance of components (a, b),
// where pr is the index of the tracked product component a*b.
// With u_r, w_r the centered values and q_r = u_r w_r, the leave-one-out
// estimates satisfy chat_(r) - chat = (S - R q_r) / ((R-1)(R-2)), S = sum q_r,
// hence jvar = (R sum q^2 - S^2) / ((R-1)(R-2)^2). sum q^2 is recovered from
// the tracked moments of (product, a, b).
static double jackknife_from_moments(long double r_count, long double s_ab, long double sum_q2) {
  const long double r = r_count;
  long double jvar = (r * sum_q2 - s_ab * s_ab) / ((r - 1.0L) * (r - 2.0L) * (r - 2.0L));
  if (jvar < 0.0L) jvar = 0.0L;
  return static_cast<double>(std::sqrt(static_cast<double>(jvar)));
}

double MCStats::cov_jackknife_se(int i, int j) const {
  if (count_ < 3) throw std::logic_error("MCStats: jackknife needs at least 3 observations");
  const int p = product_index(i, j);
  const long double mi = mean_[static_cast<std::size_t>(i)];
  const long double mj = mean_[static_cast<std::size_t>(j)];
  const long double s_ab = central2(i, j);
  const auto r = static_cast<long double>(count_);
  // q_r = (x_i - mi)(x_j - mj) = p_r - mi x_j - mj x_i + mi mj pointwise;
  // sum of squares = central quadratic form + R qbar^2, qbar = S/R
  long double central = central2(p, p) + mi * mi * central2(j, j) + mj * mj * central2(i, i) -
                        2.0L * mi * central2(p, j) - 2.0L * mj * central2(p, i) +
                        2.0L * mi * mj * central2(i, j);
  long double qbar = s_ab / r;
  long double sum_q2 = central + r * qbar * qbar;
  return jackknife_from_moments(r, s_ab, sum_q2);
}

double MCStats::zvar_jackknife_se(int j) const {
  if (count_ < 3) throw std::logic_error("MCStats: jackknife needs at least 3 observations");
  const int d = zinc_index(j);
  const int p = zinc_sq_index(j);
  const long double md = mean_[static_cast<std::size_t>(d)];
  const long double s_dd = central2(d, d);
  const auto r = static_cast<long double>(count_);
  // q_r = (d_r - md)^2 = p_r - 2 md d_r + md^2
  long double central = central2(p, p) + 4.0L * md * md * central2(d, d) -
                        4.0L * md * central2(p, d);
  long double qbar = s_dd / r;
  long double sum_q2 = central + r * qbar * qbar;
  return jackknife_from_moments(r, s_dd, sum_q2);
}

void MCStats::write_mean_csv(std::ostream& out) const {
  out << "t,v_t,mean_X\n";
  char buf[120];
  auto m = mean();
  for (int i = 0; i < points(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", tgrid_[static_cast<std::size_t>(i)],
                  vgrid_[static_cast<std::size_t>(i)], m[static_cast<std::size_t>(i)]);
    out << buf;
  }
}

void MCStats::write_cov_csv(std::ostream& out) const {
  std::vector<double> row(static_cast<std::size_t>(points()));
  write_row(out, tgrid_);
  for (int i = 0; i < points(); ++i) {
    for (int j = 0; j < points(); ++j) row[static_cast<std::size_t>(j)] = cov(i, j);
    write_row(out, row);
  }
}

void MCStats::write_zvar_csv(std::ostream& out) const {
  out << "t_from,t_to,v_gap,zvar\n";
  char buf[160];
  for (int j = 0; j + 1 < points(); ++j) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n",
                  tgrid_[static_cast<std::size_t>(j)], tgrid_[static_cast<std::size_t>(j) + 1],
                  vgrid_[static_cast<std::size_t>(j) + 1] - vgrid_[static_cast<std::size_t>(j)],
                  zvar(j));
    out << buf;
  }
}

MCStats run_campaign(const CampaignConfig& config, std::vector<std::vector<double>>* raw_out) {
  config.validate();
  const double expected_events =
      0.5 * static_cast<double>(config.n - 1) * config.t1;
  if (expected_events > 1e8) {
    throw std::length_error(
        "run_campaign: expected edge count n(n-1)/2 * t1/n exceeds 1e8; "
        "reduce n or t1");
  }

  const std::vector<double> tgrid = config.make_grid();
  const auto reps = config.replications;
  std::vector<std::vector<double>> results(static_cast<std::size_t>(reps));

  std::atomic<std::int64_t> next{0};
  std::mutex failure_mutex;
  std::exception_ptr failure;
  auto work = [&] {
    try {
      for (;;) {
        std::int64_t r = next.fetch_add(1, std::memory_order_relaxed);
        if (r >= reps) break;
        auto stream = graphproc::sample_edge_stream(config.n, config.t1,
                                                    mix_seed(config.master_seed,
                                                             static_cast<std::uint64_t>(r)));
        auto traj = graphproc::trajectory(stream, tgrid);
        auto path = graphproc::fluctuation_path(traj);
        results[static_cast<std::size_t>(r)] = std::move(path.x);
      }
    } catch (...) {
      std::scoped_lock lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(reps, std::memory_order_relaxed);  // drain remaining work
    }
  };

  const int extra = std::max(0, config.workers - 1);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(extra));
  for (int w = 0; w < extra; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  // merge in replication order: identical output for any worker count
  MCStats stats(tgrid);
  for (auto& x : results) stats.add(x);
  if (raw_out != nullptr) *raw_out = std::move(results);
  return stats;
}

namespace {

VerifyReport build_report(std::string name, const std::vector<CheckEntry>& entries) {
  VerifyReport report;
  report.name = std::move(name);
  report.entries = entries;
  report.all_pass = std::all_of(entries.begin(), entries.end(),
                                [](const CheckEntry& e) { return e.pass; });
  return report;
}

CheckEntry make_entry(double s, double t, double empirical, double theoretical, double se,
                      const TolerancePolicy& policy) {
  CheckEntry e;
  e.pair_s = s;
  e.pair_t = t;
  e.empirical = empirical;
  e.theoretical = theoretical;
  e.se = se;
  e.abs_error = std::abs(empirical - theoretical);
  e.se_units = se > 0.0 ? e.abs_error / se : (e.abs_error == 0.0 ? 0.0 : HUGE_VAL);
  e.pass = e.abs_error <=
           std::max(policy.se_units * se, policy.rel_floor * std::abs(theoretical));
  return e;
}

}  // namespace

VerifyReport verify_covariance(const MCStats& stats, const TolerancePolicy& policy) {
  if (stats.count() < 100) {
    throw std::invalid_argument("verify_covariance: need at least 100 replications");
  }
  const auto& grid = stats.grid();
  std::vector<CheckEntry> entries;
  for (int i = 0; i < static_cast<int>(grid.size()); ++i) {
    for (int j = i; j < static_cast<int>(grid.size()); ++j) {
      double theo = analytic::cov_kernel(grid[static_cast<std::size_t>(i)],
                                         grid[static_cast<std::size_t>(j)]);
      entries.push_back(make_entry(grid[static_cast<std::size_t>(i)],
                                   grid[static_cast<std::size_t>(j)], stats.cov(i, j), theo,
                                   stats.cov_jackknife_se(i, j), policy));
    }
  }
  return build_report("covariance", entries);
}

VerifyReport verify_brownian_increments(const MCStats& stats, const TolerancePolicy& policy) {
  if (stats.count() < 100) {
    throw std::invalid_argument("verify_brownian_increments: need at least 100 replications");
  }
  const auto& grid = stats.grid();
  const auto& vs = stats.zgrid();
  std::vector<CheckEntry> entries;
  for (int j = 0; j + 1 < static_cast<int>(grid.size()); ++j) {
    double theo = vs[static_cast<std::size_t>(j) + 1] - vs[static_cast<std::size_t>(j)];
    entries.push_back(make_entry(grid[static_cast<std::size_t>(j)],
                                 grid[static_cast<std::size_t>(j) + 1], stats.zvar(j), theo,
                                 stats.zvar_jackknife_se(j), policy));
  }
  return build_report("brownian_increments", entries);
}

std::string VerifyReport::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["all_pass"] = all_pass;
  j["entries"] = nlohmann::json::array();
  for (const CheckEntry& e : entries) {
    nlohmann::json row;
    row["pair"] = {e.pair_s, e.pair_t};
    row["empirical"] = e.empirical;
    row["theoretical"] = e.theoretical;
    row["se"] = e.se;
    row["abs_error"] = e.abs_error;
    row["se_units"] = e.se_units;
    row["decision"] = e.pass ? "pass" : "fail";
    j["entries"].push_back(row);
  }
  return j.dump(2);
}

double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    double f = cdf(sorted[i]);
    d = std::max(d, std::max(f - static_cast<double>(i) / n,
                             static_cast<double>(i + 1) / n - f));
  }
  return d;
}

KSResult ks_normality(std::span<const double> samples) {
  if (samples.size() < 100) {
    throw std::invalid_argument("ks_normality: need at least 100 samples");
  }
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  double sd = std::sqrt(ss / (n - 1.0));
  if (!(sd > 0.0)) throw std::invalid_argument("ks_normality: degenerate sample");

  std::vector<double> standardized(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) standardized[i] = (samples[i] - mean) / sd;

  KSResult res;
  res.sample_size = samples.size();
  res.statistic = ks_statistic(standardized, normal_cdf);
  res.critical = 1.63 / std::sqrt(n);
  res.reject = res.statistic > res.critical;
  return res;
}

}  // namespace gcfluct::harness
