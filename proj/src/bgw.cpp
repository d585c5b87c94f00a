#include "gcfluct/bgw.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace gcfluct::bgw {

namespace {

void check_params(const BGWParams& params) {
  if (params.m < 0) throw std::domain_error("bgw: offspring trial count m must be >= 0");
  if (!(params.p > 0.0) || !(params.p < 1.0)) {
    throw std::domain_error("bgw: offspring probability p must be in (0,1)");
  }
}

double log_choose(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

double total_progeny_pmf(const BGWParams& params, std::int64_t k) {
  check_params(params);
  if (k < 1) throw std::domain_error("total_progeny_pmf: k must be >= 1");
  if (params.m > 0 && k > std::numeric_limits<std::int64_t>::max() / params.m) {
    throw std::overflow_error("total_progeny_pmf: m*k overflows");
  }
  const std::int64_t mk = params.m * k;
  if (k - 1 > mk) return 0.0;  // a k-node tree needs k-1 offspring slots

  const double log_pmf = -std::log(static_cast<double>(k)) +
                         log_choose(static_cast<double>(mk), static_cast<double>(k - 1)) +
                         static_cast<double>(k - 1) * std::log(params.p) +
                         static_cast<double>(mk - k + 1) * std::log1p(-params.p);
  return std::clamp(std::exp(log_pmf), 0.0, 1.0);
}

Moments total_progeny_moments(const BGWParams& params) {
  check_params(params);
  if (params.m < 1) throw std::domain_error("total_progeny_moments: m must be >= 1");
  const double mp = static_cast<double>(params.m) * params.p;
  if (!(mp < 1.0)) {
    throw std::domain_error("total_progeny_moments: supercritical (m*p >= 1), moments diverge");
  }
  const double omp = 1.0 - mp;
  return {1.0 / omp, mp * (1.0 - params.p) / (omp * omp * omp)};
}

std::int64_t sample_total_progeny(const BGWParams& params, Rng& rng) {
  check_params(params);
  if (!(static_cast<double>(params.m) * params.p < 1.0)) {
    throw std::domain_error("sample_total_progeny: supercritical (m*p >= 1)");
  }
  constexpr std::int64_t kCap = 1'000'000'000;
  std::int64_t total = 0;
  std::int64_t frontier = 1;  // breadth-first: only the count of pending individuals matters
  while (frontier > 0) {
    --frontier;
    ++total;
    if (total > kCap) {
      throw RunawayError("sample_total_progeny: population cap exceeded");
    }
    frontier += sample_binomial(rng, params.m, params.p);
  }
  return total;
}

DominationReport check_domination(int n, double p) {
  if (n < 2 || n > 6) {
    throw std::invalid_argument("check_domination: enumeration guard requires 2 <= n <= 6");
  }
  if (!(p > 0.0) || !(p < 1.0)) {
    throw std::domain_error("check_domination: p must be in (0,1)");
  }

  const int pairs = n * (n - 1) / 2;
  std::vector<std::pair<int, int>> pair_of_bit;
  pair_of_bit.reserve(pairs);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) pair_of_bit.emplace_back(i, j);
  }

  // weight[e] = p^e (1-p)^(pairs-e)
  std::vector<double> weight(pairs + 1);
  for (int e = 0; e <= pairs; ++e) {
    weight[e] = std::pow(p, e) * std::pow(1.0 - p, pairs - e);
  }

  // distribution of the order of the component of vertex 0
  std::vector<double> size_prob(n + 1, 0.0);
  std::vector<int> adj_mask(n);
  for (std::uint32_t mask = 0; mask < (1u << pairs); ++mask) {
    std::fill(adj_mask.begin(), adj_mask.end(), 0);
    for (int b = 0; b < pairs; ++b) {
      if (mask & (1u << b)) {
        auto [i, j] = pair_of_bit[b];
        adj_mask[i] |= 1 << j;
        adj_mask[j] |= 1 << i;
      }
    }
    int reached = 1;  // bitset of vertices reachable from 0
    int frontier = 1;
    while (frontier != 0) {
      int v = std::countr_zero(static_cast<unsigned>(frontier));
      frontier &= frontier - 1;
      int fresh = adj_mask[v] & ~reached;
      reached |= fresh;
      frontier |= fresh;
    }
    size_prob[std::popcount(static_cast<unsigned>(reached))] +=
        weight[std::popcount(mask)];
  }

  auto progeny_tail = [&](int trials, int k) {
    // P(T_{trials,p} >= k) = 1 - sum_{j<k} pmf(j)
    double below = 0.0;
    for (int j = 1; j < k; ++j) below += total_progeny_pmf({trials, p}, j);
    return std::max(0.0, 1.0 - below);
  };

  DominationReport report;
  report.n = n;
  report.p = p;
  report.all_hold = true;
  double component_tail = 1.0;
  for (int k = 1; k <= n; ++k) {
    if (k > 1) component_tail -= size_prob[k - 1];
    DominationReport::Row row;
    row.k = k;
    row.p_component = std::max(0.0, component_tail);
    row.p_upper = progeny_tail(n, k);
    row.p_lower = progeny_tail(n - k, k);
    row.margin_upper = row.p_upper - row.p_component;
    row.margin_lower = row.p_component - row.p_lower;
    if (row.margin_upper < -1e-12 || row.margin_lower < -1e-12) report.all_hold = false;
    report.rows.push_back(row);
  }
  return report;
}

std::string DominationReport::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["p"] = p;
  j["all_hold"] = all_hold;
  j["k"] = nlohmann::json::array();
  j["p_component"] = nlohmann::json::array();
  j["p_progeny_upper"] = nlohmann::json::array();
  j["p_progeny_lower"] = nlohmann::json::array();
  j["margin_upper"] = nlohmann::json::array();
  j["margin_lower"] = nlohmann::json::array();
  for (const Row& r : rows) {
    j["k"].push_back(r.k);
    j["p_component"].push_back(r.p_component);
    j["p_progeny_upper"].push_back(r.p_upper);
    j["p_progeny_lower"].push_back(r.p_lower);
    j["margin_upper"].push_back(r.margin_upper);
    j["margin_lower"].push_back(r.margin_lower);
  }
  return j.dump(2);
}

}  // namespace gcfluct::bgw
