#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

namespace gcfluct::graphproc {

struct Edge {
  std::uint32_t i, j;  // 0-based vertex ids, i < j
  double time;         // arrival time in (0, t_max]
};

// One realization of the coupled graph process restricted to [0, t_max]:
// the graph at time t <= t_max consists of the events with time <= t and is
// marginally ER(n, t/n).
struct EdgeStream {
  std::int64_t n = 0;
  double t_max = 0.0;
  std::vector<Edge> events;  // sorted by time, all pairs distinct
};

// Samples a stream: edge count ~ Binomial(n(n-1)/2, t_max/n), pairs uniform
// without replacement, arrival times i.i.d. uniform on (0, t_max].
// Deterministic in (n, t_max, seed). Requires n >= 2 and 0 < t_max < n.
EdgeStream sample_edge_stream(std::int64_t n, double t_max, std::uint64_t seed);

// Order of the largest component along a time grid.
struct Trajectory {
  std::int64_t n = 0;
  std::vector<double> grid;         // strictly increasing, within (0, t_max]
  std::vector<std::int64_t> giant;  // nondecreasing, in [1, n]
};

// Single pass over the sorted events with a union-by-size / path-compression
// disjoint-set structure; the running maximum component order is recorded at
// each grid time. Grid must be strictly increasing and within (0, t_max].
Trajectory trajectory(const EdgeStream& stream, std::span<const double> grid);

// Rescaled fluctuations X_n(t) = (L_n(t) - n rho(t)) / sqrt(n) and the
// time-changed values Z = u(t) X_n(t) indexed by v(t).
struct FluctuationPath {
  std::vector<double> grid;   // t values, all > 1
  std::vector<double> x;      // fluctuations
  std::vector<double> zgrid;  // v(t), strictly increasing
  std::vector<double> z;      // u(t) * x
};

FluctuationPath fluctuation_path(const Trajectory& traj);

// Exhaustive component-size oracle for tests; refuses n > 12. Returns the
// multiset of component sizes, sorted descending.
std::vector<int> brute_force_components(int n, const std::vector<std::pair<int, int>>& edges);

// Component sizes of the full stream (all events applied), sorted descending.
std::vector<std::int64_t> component_sizes(const EdgeStream& stream);

// CSV with header t,L,X,v_t,Z at full double precision.
void write_csv(std::ostream& out, const Trajectory& traj, const FluctuationPath& path);

}  // namespace gcfluct::graphproc
