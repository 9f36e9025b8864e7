#pragma once

#include "rql/params.hpp"

namespace rql {

// Closed-form side of the model: the density and CDF of the initial busy
// period, its Laplace transform, and the limiting law of the served-customer
// wait. One instance carries the tolerance knobs so every route through the
// numbers is reproducible.
class AnalyticLaw {
  public:
    explicit AnalyticLaw(const Parameters& params, double series_tol = 1e-10,
                         double quad_tol = 1e-9, double switch_point = 20.0);

    const Parameters& params() const noexcept { return params_; }

    // Busy-period density
    //   f(t) = sqrt(max(rho,1/rho)) * (1/t) * exp(-(lambda+mu)t) * I1(2t*sqrt(lambda*mu)).
    // t = 0 is a removable singularity; we return the limit
    // sqrt(max(rho,1/rho)) * sqrt(lambda*mu). Total mass is min(1, 1/rho):
    // the deficit for rho > 1 is the chance the busy run never ends.
    double busy_density(double t) const;

    // log f(t), stable out to arbitrarily large t (the density underflows
    // past t ~ 40000 in the off-critical regimes; its log does not).
    double log_busy_density(double t) const;

    // P(busy period <= x) summed term by term: mass m contributes
    // c_m * P(2m+1, (lambda+mu)x) with P the regularized lower incomplete
    // gamma. Truncation is driven by the tail bound
    //   remainder <= P(2m+3, (lambda+mu)x) * (min(1,mu/lambda) - sum c_j),
    // pushed below series_tol.
    double busy_cdf_series(double x) const;

    // integral_0^x exp(-s t) f(t) dt by adaptive quadrature; x may be
    // +infinity (the algebraic critical tail is handled by a u = t^{-1/2}
    // substitution, so rho = 1 converges like any other case).
    double density_integral(double x, double s = 0.0) const;

    // Limiting CDF of a served customer's wait, given the mean return index
    // m: a point mass 1/m at zero plus the scaled busy-period mass on (0, x],
    // normalized so the value at the deadline is exactly 1.
    double limiting_cdf(double m, double x) const;

  private:
    Parameters params_;
    double series_tol_;
    double quad_tol_;
    double switch_point_;
    double gap_;   // (sqrt(lambda) - sqrt(mu))^2, the exponential decay rate
    double bsc_;   // 2*sqrt(lambda*mu), the Bessel argument scale
    double pref_;  // sqrt(max(rho, 1/rho))
};

// Laplace transform of the busy-period law at real s > 0:
//   (lambda+mu+s - sqrt((lambda+mu+s)^2 - 4*lambda*mu)) / (2*lambda),
// evaluated in its cancellation-free form. For rho <= 1 this equals
// integral e^{-st} f(t) dt directly; for rho > 1 the integral is rho times it.
double laplace_gamma(const Parameters& params, double s);

}  // namespace rql
