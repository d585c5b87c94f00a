#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gcfluct/rng.hpp"

namespace gcfluct::bgw {

// Bienayme-Galton-Watson process with Binomial(m, p) offspring.
struct BGWParams {
  std::int64_t m = 1;
  double p = 0.5;
};

// Thrown by sample_total_progeny when the population cap is exceeded,
// which signals a mis-set supercritical parameter.
struct RunawayError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// P(total progeny = k), Dwass/Otter hitting-time form:
//   (1/k) C(mk, k-1) p^(k-1) (1-p)^(mk-k+1)
// evaluated in log space. Valid for any m >= 0 and p in (0,1); k >= 1.
double total_progeny_pmf(const BGWParams& params, std::int64_t k);

struct Moments {
  double mean;      // 1 / (1 - mp)
  double variance;  // mp(1-p) / (1 - mp)^3
};

// Subcritical total progeny moments; requires m >= 1 and m*p < 1.
Moments total_progeny_moments(const BGWParams& params);

// Exact sample by breadth-first simulation: each individual reproduces
// Binomial(m, p). Requires m*p < 1; a hard cap of 1e9 individuals raises
// RunawayError instead of truncating silently.
std::int64_t sample_total_progeny(const BGWParams& params, Rng& rng);

// Exhaustive check, for all k, of the sandwich
//   P(T_{n-k,p} >= k) <= P(L_{n,p} >= k) <= P(T_{n,p} >= k)
// where L_{n,p} is the order of the component of a marked vertex in ER(n,p)
// (computed by enumerating all 2^(n(n-1)/2) graphs) and T is a BGW total
// progeny. Refuses n > 6.
struct DominationReport {
  int n = 0;
  double p = 0.0;
  struct Row {
    int k;
    double p_component;     // P(L_{n,p} >= k), exact enumeration
    double p_upper;         // P(T_{n,p} >= k)
    double p_lower;         // P(T_{n-k,p} >= k)
    double margin_upper;    // p_upper - p_component
    double margin_lower;    // p_component - p_lower
  };
  std::vector<Row> rows;    // k = 1..n
  bool all_hold = false;

  std::string to_json() const;
};

DominationReport check_domination(int n, double p);

}  // namespace gcfluct::bgw
