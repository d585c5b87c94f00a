#include "gcfluct/graphproc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <unordered_set>

#include "gcfluct/analytic.hpp"
#include "gcfluct/rng.hpp"

namespace gcfluct::graphproc {

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::int64_t n) : parent_(n), size_(n, 1) {
    for (std::int64_t i = 0; i < n; ++i) parent_[i] = i;
  }

  std::int64_t find(std::int64_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];  // path halving
      x = parent_[x];
    }
    return x;
  }

  // Returns the size of the merged component (or of the common one).
  std::int64_t unite(std::int64_t a, std::int64_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return size_[a];
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return size_[a];
  }

  std::int64_t size(std::int64_t x) { return size_[find(x)]; }

 private:
  std::vector<std::int64_t> parent_;
  std::vector<std::int64_t> size_;
};

void check_grid(std::span<const double> grid, double t_max) {
  double prev = 0.0;
  for (double t : grid) {
    if (!std::isfinite(t) || t <= prev) {
      throw std::invalid_argument("grid must be strictly increasing and positive");
    }
    prev = t;
  }
  if (!grid.empty() && grid.back() > t_max) {
    throw std::invalid_argument("grid exceeds the sampled window t_max");
  }
}

}  // namespace

EdgeStream sample_edge_stream(std::int64_t n, double t_max, std::uint64_t seed) {
  if (n < 2) throw std::domain_error("sample_edge_stream: need n >= 2");
  if (n > static_cast<std::int64_t>(std::numeric_limits<std::uint32_t>::max())) {
    throw std::domain_error("sample_edge_stream: n exceeds the 32-bit vertex id range");
  }
  if (!std::isfinite(t_max) || t_max <= 0.0) {
    throw std::domain_error("sample_edge_stream: need t_max > 0");
  }
  if (t_max >= static_cast<double>(n)) {
    throw std::domain_error("sample_edge_stream: need t_max < n (edge probability below 1)");
  }

  Rng rng(seed);
  const std::int64_t pairs = n * (n - 1) / 2;
  const double p = t_max / static_cast<double>(n);
  const std::int64_t m = sample_binomial(rng, pairs, p);

  EdgeStream out;
  out.n = n;
  out.t_max = t_max;
  out.events.reserve(static_cast<std::size_t>(m));

  std::unordered_set<std::uint64_t> seen;
  seen.reserve(static_cast<std::size_t>(m) * 2);
  const auto un = static_cast<std::uint64_t>(n);
  while (static_cast<std::int64_t>(out.events.size()) < m) {
    std::uint64_t a = rng.bounded(un);
    std::uint64_t b = rng.bounded(un);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (!seen.insert(a * un + b).second) continue;
    double time = t_max * rng.uniform_open01();  // in (0, t_max]
    out.events.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), time});
  }
  // ties (possible in floating point) keep generation order
  std::stable_sort(out.events.begin(), out.events.end(),
                   [](const Edge& a, const Edge& b) { return a.time < b.time; });
  return out;
}

Trajectory trajectory(const EdgeStream& stream, std::span<const double> grid) {
  check_grid(grid, stream.t_max);

  Trajectory traj;
  traj.n = stream.n;
  traj.grid.assign(grid.begin(), grid.end());
  traj.giant.reserve(grid.size());

  UnionFind uf(stream.n);
  std::int64_t largest = 1;
  std::size_t next_event = 0;
  for (double t : grid) {
    while (next_event < stream.events.size() && stream.events[next_event].time <= t) {
      const Edge& e = stream.events[next_event++];
      largest = std::max(largest, uf.unite(e.i, e.j));
    }
    traj.giant.push_back(largest);
  }
  return traj;
}

FluctuationPath fluctuation_path(const Trajectory& traj) {
  FluctuationPath path;
  path.grid = traj.grid;
  const double sqrt_n = std::sqrt(static_cast<double>(traj.n));
  path.x.reserve(traj.grid.size());
  path.z.reserve(traj.grid.size());
  path.zgrid.reserve(traj.grid.size());
  for (std::size_t k = 0; k < traj.grid.size(); ++k) {
    double t = traj.grid[k];
    if (t <= 1.0) {
      throw std::domain_error("fluctuation_path: grid times must be > 1");
    }
    auto b = analytic::scaling(t);
    double x = (static_cast<double>(traj.giant[k]) - static_cast<double>(traj.n) * b.rho) / sqrt_n;
    path.x.push_back(x);
    path.z.push_back(b.u * x);
    path.zgrid.push_back(b.v);
  }
  return path;
}

std::vector<int> brute_force_components(int n, const std::vector<std::pair<int, int>>& edges) {
  if (n > 12) throw std::invalid_argument("brute_force_components: oracle limited to n <= 12");
  if (n < 0) throw std::invalid_argument("brute_force_components: n must be nonnegative");

  std::vector<std::vector<int>> adj(n);
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n || b >= n) {
      throw std::invalid_argument("brute_force_components: vertex id out of range");
    }
    adj[a].push_back(b);
    adj[b].push_back(a);
  }

  std::vector<int> sizes;
  std::vector<bool> visited(n, false);
  std::vector<int> stack;
  for (int v = 0; v < n; ++v) {
    if (visited[v]) continue;
    int size = 0;
    stack.push_back(v);
    visited[v] = true;
    while (!stack.empty()) {
      int w = stack.back();
      stack.pop_back();
      ++size;
      for (int x : adj[w]) {
        if (!visited[x]) {
          visited[x] = true;
          stack.push_back(x);
        }
      }
    }
    sizes.push_back(size);
  }
  std::sort(sizes.rbegin(), sizes.rend());
  return sizes;
}

std::vector<std::int64_t> component_sizes(const EdgeStream& stream) {
  UnionFind uf(stream.n);
  for (const Edge& e : stream.events) uf.unite(e.i, e.j);
  std::vector<std::int64_t> size_of_root(stream.n, 0);
  for (std::int64_t v = 0; v < stream.n; ++v) size_of_root[uf.find(v)] = uf.size(v);
  std::vector<std::int64_t> sizes;
  for (std::int64_t s : size_of_root) {
    if (s > 0) sizes.push_back(s);
  }
  std::sort(sizes.rbegin(), sizes.rend());
  return sizes;
}

void write_csv(std::ostream& out, const Trajectory& traj, const FluctuationPath& path) {
  if (traj.grid != path.grid) {
    throw std::invalid_argument("write_csv: trajectory and fluctuation path grids differ");
  }
  out << "t,L,X,v_t,Z\n";
  char buf[160];
  for (std::size_t k = 0; k < traj.grid.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g,%lld,%.17g,%.17g,%.17g\n", traj.grid[k],
                  static_cast<long long>(traj.giant[k]), path.x[k], path.zgrid[k], path.z[k]);
    out << buf;
  }
}

}  // namespace gcfluct::graphproc
