#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <ostream>
#include <span>
#include <vector>

namespace gcfluct::appendixlab {

// Connectivity probabilities P_n(s) of ER(n, 1 - e^{-s}) via the recursion
//   P_n = 1 - sum_{k=1}^{n-1} C(n-1, k-1) P_k q^{k(n-k)},  q = e^{-s},
// which conditions on the order of the component of a marked vertex.
//
// The recursion subtracts from 1 a sum whose weights C(n-1,k-1) q^{k(n-k)}
// grow far beyond 1 for sparse s, so rounding errors are amplified row after
// row and fixed double precision collapses long before n = 600. Rows are
// therefore kept in arbitrary-precision arithmetic; the working precision is
// doubled until two consecutive runs agree, which makes the table
// self-validating for any (n, s).
//
// One table memoizes all P_k for a fixed s; sweeps that reuse many P_k
// should share a table instead of calling connectivity_prob repeatedly.
class ConnectivityTable {
 public:
  explicit ConnectivityTable(double s);
  ~ConnectivityTable();
  ConnectivityTable(ConnectivityTable&&) noexcept;
  ConnectivityTable& operator=(ConnectivityTable&&) noexcept;

  double prob(std::int64_t n);  // P_n(s); extends the table on demand
  double s() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Convenience wrapper building a throwaway table. Requires n >= 1, s > 0.
double connectivity_prob(std::int64_t n, double s);

// (1 - y/(e^y - 1)) (1 - e^{-y})^n, the large-n connectivity asymptotic at
// edge probability 1 - e^{-y/n}, without the 1 + o(1) factor.
// Requires y >= 1, n >= 1.
double stepanov_asymptotic(std::int64_t n, double y);

// Expected number of components with k vertices in ER(n, 1 - e^{-y/n}):
//   C(n,k) e^{-y k (1 - k/n)} P_k(y/n).
// Requires 1 <= k <= n and y > 0.
double expected_components(std::int64_t n, std::int64_t k, double y);

// Large-deviation functions controlling the fluctuation tails:
//   delta(x,y) = 1 - e^{-xy} - x
//   phi(x,y)   = -xy(1-x) + x ln(1 - e^{-xy}) - x ln x - (1-x) ln(1-x)
//   psi(x,d)   = x ln(1 + d/x) + (1-x) ln(1 - d/(1-x))
// phi(x,y) = psi(x, delta(x,y)) identically; phi vanishes only at x = rho(y).
struct LDFunctions {
  double x;
  double y;
  double delta;
  double phi;  // direct formula
  double psi;  // log1p form evaluated at delta(x,y)
};

// Requires 0 < x < 1 and y > 1.
LDFunctions ld_functions(double x, double y);

// Counts fluctuation samples exceeding the n^gamma threshold.
struct TailReport {
  std::size_t sample_size = 0;
  double gamma = 0.0;
  double threshold = 0.0;
  std::size_t exceedances = 0;
};

// Requires 0 < gamma < 0.5.
TailReport tail_check(std::span<const double> samples, std::int64_t n, double gamma);

// CSV rows n,k,y,expected_components,stepanov_ratio for each (n, y) in the
// cross product and k = 1..k_max; stepanov_ratio = P_n(y/n) / asymptotic.
void write_sweep_csv(std::ostream& out, std::span<const std::int64_t> n_values,
                     std::span<const double> y_values, std::int64_t k_max);

}  // namespace gcfluct::appendixlab
