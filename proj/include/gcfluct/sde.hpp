#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "gcfluct/rng.hpp"

namespace gcfluct::sde {

enum class Mode { stochastic, deterministic };

struct SDEPath {
  std::vector<double> grid;    // strictly increasing, all > 1
  std::vector<double> values;  // process values at grid times
  Mode mode = Mode::stochastic;
};

// Explicit Euler-Maruyama integrator for
//   dX = a(t, X) dt + sqrt(b(t)) dW
// with drift/diffusion from analytic::sde_coefficients. The coefficient
// tables along the uniform step grid are built once, so many paths can be
// integrated cheaply. Deterministic mode disables the noise term, leaving
// the ODE x' = a(t, x) whose solution is x0 * u(t0) / u(t).
class EulerIntegrator {
 public:
  EulerIntegrator(double t0, double t1, std::int64_t steps, Mode mode);

  SDEPath run(double x0, Rng& rng) const;
  double run_final(double x0, Rng& rng) const;  // final value only

  const std::vector<double>& grid() const { return tgrid_; }
  Mode mode() const { return mode_; }

 private:
  Mode mode_;
  double h_;
  std::vector<double> tgrid_;        // steps + 1 points, tgrid_[0] = t0
  std::vector<double> drift_slope_;  // a(t_k, x) / x at the left endpoints
  std::vector<double> noise_scale_;  // sqrt(b(t_k) * h), zero in deterministic mode
};

// One path over [t0, t1] with uniform step (t1 - t0)/steps.
// Requires 1 < t0 < t1 and steps >= 1.
SDEPath euler_maruyama(double t0, double t1, double x0, std::int64_t steps, Mode mode, Rng& rng);

// Samples the limit process X(t) = B(v(t)) / u(t) exactly in law at the grid
// points: B is built from independent Gaussian increments over the v-gaps
// (the first point has variance v(grid[0])). Grid must be strictly
// increasing with all entries > 1.
SDEPath closed_form_sample(std::span<const double> grid, Rng& rng);

// CSV with header t,value at full double precision.
void write_csv(std::ostream& out, const SDEPath& path);

}  // namespace gcfluct::sde
