#include "gcfluct/sde.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "gcfluct/analytic.hpp"

namespace gcfluct::sde {

EulerIntegrator::EulerIntegrator(double t0, double t1, std::int64_t steps, Mode mode)
    : mode_(mode) {
  if (!(t0 > 1.0) || !std::isfinite(t0)) {
    throw std::domain_error("EulerIntegrator: t0 must be > 1");
  }
  if (!(t1 > t0) || !std::isfinite(t1)) {
    throw std::domain_error("EulerIntegrator: need t0 < t1");
  }
  if (steps < 1) throw std::domain_error("EulerIntegrator: steps must be >= 1");

  h_ = (t1 - t0) / static_cast<double>(steps);
  tgrid_.resize(static_cast<std::size_t>(steps) + 1);
  drift_slope_.resize(static_cast<std::size_t>(steps));
  noise_scale_.resize(static_cast<std::size_t>(steps));
  for (std::int64_t k = 0; k <= steps; ++k) {
    tgrid_[static_cast<std::size_t>(k)] =
        (k == steps) ? t1 : t0 + h_ * static_cast<double>(k);
  }
  for (std::int64_t k = 0; k < steps; ++k) {
    auto c = analytic::sde_coefficients(tgrid_[static_cast<std::size_t>(k)], 1.0);
    drift_slope_[static_cast<std::size_t>(k)] = c.drift;  // a(t,x) is linear in x
    noise_scale_[static_cast<std::size_t>(k)] =
        (mode == Mode::deterministic) ? 0.0 : std::sqrt(c.diffusion * h_);
  }
}

SDEPath EulerIntegrator::run(double x0, Rng& rng) const {
  SDEPath path;
  path.mode = mode_;
  path.grid = tgrid_;
  path.values.resize(tgrid_.size());
  double x = x0;
  path.values[0] = x;
  for (std::size_t k = 0; k + 1 < tgrid_.size(); ++k) {
    double xi = (mode_ == Mode::deterministic) ? 0.0 : rng.normal();
    x += drift_slope_[k] * x * h_ + noise_scale_[k] * xi;
    path.values[k + 1] = x;
  }
  return path;
}

double EulerIntegrator::run_final(double x0, Rng& rng) const {
  double x = x0;
  for (std::size_t k = 0; k < drift_slope_.size(); ++k) {
    double xi = (mode_ == Mode::deterministic) ? 0.0 : rng.normal();
    x += drift_slope_[k] * x * h_ + noise_scale_[k] * xi;
  }
  return x;
}

SDEPath euler_maruyama(double t0, double t1, double x0, std::int64_t steps, Mode mode,
                       Rng& rng) {
  EulerIntegrator integrator(t0, t1, steps, mode);
  return integrator.run(x0, rng);
}

SDEPath closed_form_sample(std::span<const double> grid, Rng& rng) {
  if (grid.empty()) throw std::invalid_argument("closed_form_sample: empty grid");
  double prev = 1.0;
  for (double t : grid) {
    if (!std::isfinite(t) || t <= 1.0) {
      throw std::domain_error("closed_form_sample: grid times must be > 1");
    }
    if (t <= prev && prev != 1.0) {
      throw std::invalid_argument("closed_form_sample: grid must be strictly increasing");
    }
    prev = t;
  }

  SDEPath path;
  path.mode = Mode::stochastic;
  path.grid.assign(grid.begin(), grid.end());
  path.values.resize(grid.size());
  double brownian = 0.0;
  double v_prev = 0.0;  // B(0) = 0
  for (std::size_t k = 0; k < grid.size(); ++k) {
    auto b = analytic::scaling(grid[k]);
    brownian += std::sqrt(b.v - v_prev) * rng.normal();
    v_prev = b.v;
    path.values[k] = brownian / b.u;
  }
  return path;
}

void write_csv(std::ostream& out, const SDEPath& path) {
  out << "t,value\n";
  char buf[80];
  for (std::size_t k = 0; k < path.grid.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", path.grid[k], path.values[k]);
    out << buf;
  }
}

}  // namespace gcfluct::sde
