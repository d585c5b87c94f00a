#include "gcfluct/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace gcfluct::analytic {

namespace {

double survival_residual(double t, double x) { return 1.0 - x - std::exp(-t * x); }

// Bisection on [lo, hi] assuming residual(lo) > 0 > residual(hi).
double bisect_rho(double t, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    double f = survival_residual(t, mid);
    if (std::abs(f) <= 1e-15) return mid;
    (f > 0.0 ? lo : hi) = mid;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
  }
  return 0.5 * (lo + hi);
}

// w(t) = 1 - rho(t) with full relative precision, t > 1. A Newton/bisection
// pass locates rho; the backward map w = exp(-t rho) then yields the
// complement to relative (not absolute) accuracy, and a short Newton polish
// on g(w) = w - exp(-t (1 - w)) removes the remaining drift.
double survival_complement(double t) {
  double x = 1.0 - 1.0 / t;  // Newton seed for rho
  bool newton_ok = false;
  for (int i = 0; i < 100; ++i) {
    double e = std::exp(-t * x);
    double f = 1.0 - x - e;
    double fp = t * e - 1.0;
    if (fp == 0.0) break;
    double nx = x - f / fp;
    if (!(nx > 0.0) || !(nx < 1.0)) break;
    if (nx == x || std::abs(nx - x) <= 1e-17 * x) {
      x = nx;
      newton_ok = true;
      break;
    }
    x = nx;
  }
  if (!newton_ok && std::abs(survival_residual(t, x)) > 1e-13) {
    x = bisect_rho(t, 1e-12, 1.0 - 1e-12);
  }

  double w = std::exp(-t * x);
  for (int i = 0; i < 4; ++i) {
    double ew = std::exp(-t * (1.0 - w));
    double gp = 1.0 - t * ew;  // g'(w), equals 1 - lambda at the root
    if (gp == 0.0) break;
    double step = (w - ew) / gp;
    double nw = w - step;
    if (!(nw > 0.0) || !(nw < 1.0)) break;
    w = nw;
    if (std::abs(step) <= 4e-16 * w) break;
  }
  return w;
}

ScalingBundle bundle_from_complement(double t, double w) {
  ScalingBundle b;
  b.t = t;
  b.rho = 1.0 - w;
  b.rho_complement = w;
  b.lambda = t * w;
  double one_minus_lambda = 1.0 - b.lambda;
  b.u = 1.0 / w - t;
  b.v = (1.0 - w) / w;
  b.sigma2 = (1.0 - w) * w / (one_minus_lambda * one_minus_lambda);
  b.rho_prime = (1.0 - w) * w / one_minus_lambda;
  return b;
}

// v(t) = rho/(1-rho); 0 at and below criticality.
double v_value(double t) {
  if (t <= 1.0) return 0.0;
  double w = survival_complement(t);
  return (1.0 - w) / w;
}

void require_supercritical(double t, const char* who) {
  if (!std::isfinite(t) || t <= 1.0) {
    throw std::domain_error(std::string(who) + ": t must be > 1");
  }
}

}  // namespace

double rho(double t) {
  if (!std::isfinite(t) || t < 0.0) {
    throw std::domain_error("rho: t must be finite and nonnegative");
  }
  if (t <= 1.0) return 0.0;
  return 1.0 - survival_complement(t);
}

ScalingBundle scaling(double t) {
  if (!std::isfinite(t) || t <= 1.0) {
    throw std::domain_error("scaling: t must be > 1 (u, v degenerate at criticality)");
  }
  return bundle_from_complement(t, survival_complement(t));
}

double v_inverse(double s) {
  if (!std::isfinite(s) || s <= 0.0) {
    throw std::domain_error("v_inverse: s must be finite and > 0");
  }
  double hi = 2.0;
  while (v_value(hi) < s) {
    hi *= 2.0;
    if (hi > 1e300) throw std::domain_error("v_inverse: s out of representable range");
  }
  double lo = 1.0;  // v(1) = 0 < s
  // residual target 1e-13, capped below by the double resolution of v near s
  const double tol = std::max(1e-13, 4.0 * std::numeric_limits<double>::epsilon() * s);
  double mid = 0.5 * (lo + hi);
  for (int i = 0; i < 200; ++i) {
    mid = 0.5 * (lo + hi);
    double f = v_value(mid) - s;
    if (std::abs(f) <= tol) return mid;
    (f < 0.0 ? lo : hi) = mid;
    if (hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * hi) break;
  }
  return mid;
}

double cov_kernel(double s, double t) {
  require_supercritical(s, "cov_kernel");
  require_supercritical(t, "cov_kernel");
  ScalingBundle bs = scaling(s);
  ScalingBundle bt = scaling(t);
  return std::min(bs.v, bt.v) / (bs.u * bt.u);
}

SdeCoefficients sde_coefficients(double t, double x) {
  require_supercritical(t, "sde_coefficients");
  if (!std::isfinite(x)) {
    throw std::domain_error("sde_coefficients: x must be finite");
  }
  double w = survival_complement(t);
  double oml = 1.0 - t * w;  // 1 - lambda
  double slope = (2.0 * w - 1.0) / oml - (1.0 - w) * w * t / (oml * oml);
  return {slope * x, (1.0 - w) * w / (oml * oml * oml)};
}

}  // namespace gcfluct::analytic
