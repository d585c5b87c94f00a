#pragma once

// Deterministic functions of the supercritical Erdos-Renyi graph process:
// the survival probability rho(t) solving 1 - x = exp(-t x), the dual
// parameter lambda(t) = t(1 - rho), the scale u(t) = 1/(1-rho) - t and clock
// v(t) = 1/(1-rho) - 1 of the limiting Gaussian process B(v(t))/u(t), its
// covariance kernel, and the drift/diffusion coefficients of the associated
// linear SDE.
//
// rho approaches 1 exponentially fast, so 1 - rho recovered from a rounded
// rho loses relative precision for large t. The solver therefore tracks the
// complement w = 1 - rho directly and every derived quantity is computed
// from w; the bundle exposes the complement so callers and tests can stay in
// the well-conditioned parametrization.

namespace gcfluct::analytic {

struct ScalingBundle {
  double t;               // mean-degree parameter, > 1
  double rho;             // survival probability in (0,1)
  double rho_complement;  // 1 - rho at full relative precision
  double lambda;          // t * (1 - rho), in (0,1)
  double u;               // 1/(1-rho) - t, equals (1-lambda)/(1-rho)
  double v;               // 1/(1-rho) - 1, equals rho/(1-rho)
  double sigma2;          // limiting variance, rho(1-rho)/(1-lambda)^2 = v/u^2
  double rho_prime;       // rho(1-rho)/(1-lambda)
};

// Unique root of 1 - x = exp(-t x) in (0,1) for t > 1, and 0 for t in [0,1].
// Newton seeded at 1 - 1/t with a bisection fallback; residual <= 1e-13.
// Throws std::domain_error for negative or non-finite t.
double rho(double t);

// All scaling functions evaluated together; requires t > 1.
ScalingBundle scaling(double t);

// Functional inverse of v: returns t > 1 with v(t) = s (up to the resolution
// of double arithmetic, residual <= max(1e-12, a few ulps of s)).
// Requires s > 0.
double v_inverse(double s);

// Covariance kernel of the limit process, v(min(s,t)) / (u(s) u(t)).
// Requires s, t > 1.
double cov_kernel(double s, double t);

struct SdeCoefficients {
  double drift;      // a(t,x) = [(1-2rho)/(1-lambda) - rho(1-rho)t/(1-lambda)^2] x
  double diffusion;  // b(t)   = rho(1-rho)/(1-lambda)^3
};

// Coefficients of dX = a(t,X) dt + sqrt(b(t)) dW. Requires t > 1, x finite.
SdeCoefficients sde_coefficients(double t, double x);

}  // namespace gcfluct::analytic
