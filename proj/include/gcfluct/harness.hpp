#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace gcfluct::harness {

struct CampaignConfig {
  std::int64_t n = 10000;
  double t0 = 1.5;
  double t1 = 3.0;
  int grid_points = 8;            // placed uniformly in v-scale over [t0, t1]
  std::vector<double> grid;       // optional explicit t-grid; overrides grid_points
  std::int64_t replications = 1000;
  std::uint64_t master_seed = 1;
  int workers = 1;

  void validate() const;
  std::vector<double> make_grid() const;

  std::string to_json() const;
  static CampaignConfig from_json(const std::string& text);
};

// Streaming accumulator over replications of the fluctuation vector X on a
// fixed time grid. Tracks enough joint moments (values, pairwise products,
// Z-increments and their squares) that sample covariances, Z-increment
// variances and their exact delete-one jackknife standard errors can all be
// read off without revisiting the data. Accumulators merge exactly (Chan
// update), so campaigns can be combined.
class MCStats {
 public:
  explicit MCStats(std::vector<double> tgrid);

  void add(std::span<const double> x);
  void merge(const MCStats& other);

  std::int64_t count() const { return count_; }
  const std::vector<double>& grid() const { return tgrid_; }
  const std::vector<double>& zgrid() const { return vgrid_; }  // v(t) per grid point

  std::vector<double> mean() const;
  double cov(int i, int j) const;    // sample covariance of X_i, X_j
  double zvar(int j) const;          // sample variance of Z increment j -> j+1
  double cov_jackknife_se(int i, int j) const;
  double zvar_jackknife_se(int j) const;

  void write_mean_csv(std::ostream& out) const;
  void write_cov_csv(std::ostream& out) const;
  void write_zvar_csv(std::ostream& out) const;

 private:
  int points() const { return static_cast<int>(tgrid_.size()); }
  int product_index(int i, int j) const;  // extended-vector index of X_i X_j
  int zinc_index(int j) const;
  int zinc_sq_index(int j) const;
  long double central2(int a, int b) const { return m2_[static_cast<std::size_t>(a) * dim_ + b]; }

  std::vector<double> tgrid_;
  std::vector<double> vgrid_;
  std::vector<double> ugrid_;
  int dim_ = 0;
  std::int64_t count_ = 0;
  std::vector<long double> mean_;
  std::vector<long double> m2_;  // comoment matrix, dim_ x dim_
  std::vector<double> ybuf_;
  std::vector<long double> dbuf_;
};

// Runs `replications` independent realizations (seed_r = mix_seed(master, r)),
// each sampling one edge stream on [0, t1] and accumulating the fluctuation
// vector on the grid. Results are merged in replication order, so they are
// bitwise identical for any worker count. If raw_out is non-null it receives
// the per-replication X vectors in replication order.
MCStats run_campaign(const CampaignConfig& config,
                     std::vector<std::vector<double>>* raw_out = nullptr);

struct TolerancePolicy {
  double se_units = 3.0;   // allowed deviation in jackknife standard errors
  double rel_floor = 0.1;  // relative tolerance floor, absorbs finite-n bias
};

struct CheckEntry {
  double pair_s = 0.0;
  double pair_t = 0.0;
  double empirical = 0.0;
  double theoretical = 0.0;
  double se = 0.0;
  double abs_error = 0.0;
  double se_units = 0.0;
  bool pass = false;
};

struct VerifyReport {
  std::string name;
  std::vector<CheckEntry> entries;
  bool all_pass = true;

  std::string to_json() const;
};

// Compares every grid pair (s,t) of the empirical covariance to the kernel
// v(min)/(u(s)u(t)); the diagonal doubles as the sigma^2 check.
// Requires count >= 100.
VerifyReport verify_covariance(const MCStats& stats, const TolerancePolicy& policy = {});

// Compares Var(Z(t_{j+1}) - Z(t_j)) to the Brownian prediction v(t_{j+1}) - v(t_j)
// for consecutive grid times. Requires count >= 100.
VerifyReport verify_brownian_increments(const MCStats& stats, const TolerancePolicy& policy = {});

// Kolmogorov-Smirnov distance between the empirical distribution of `samples`
// and `cdf`; no standardization.
double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);

struct KSResult {
  double statistic = 0.0;
  double critical = 0.0;  // 1% asymptotic value 1.63/sqrt(n)
  std::size_t sample_size = 0;
  bool reject = false;
};

// Standardizes by sample mean/sd and tests against the standard normal.
// Requires at least 100 samples.
KSResult ks_normality(std::span<const double> samples);

}  // namespace gcfluct::harness
