#include "rql/analytics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <string>

#include "rql/bessel.hpp"
#include "rql/errors.hpp"

namespace rql {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using gk15 = boost::math::quadrature::gauss_kronrod<double, 15>;

}  // namespace

AnalyticLaw::AnalyticLaw(const Parameters& params, double series_tol, double quad_tol,
                         double switch_point)
    : params_(validate(params)),
      series_tol_(series_tol),
      quad_tol_(quad_tol),
      switch_point_(switch_point) {
    if (!(series_tol_ > 0.0) || !(quad_tol_ > 0.0) || !(switch_point_ > 0.0))
        throw validation_error("tolerances and switch point must be positive");
    const double sl = std::sqrt(params_.lambda);
    const double sm = std::sqrt(params_.mu);
    gap_ = (sl - sm) * (sl - sm);
    bsc_ = 2.0 * sl * sm;
    pref_ = std::sqrt(std::max(params_.rho(), 1.0 / params_.rho()));
}

double AnalyticLaw::busy_density(double t) const {
    if (!(t >= 0.0)) throw validation_error("busy_density: t must be nonnegative");
    const double lm = params_.lambda * params_.mu;
    if (t <= 1e-6) {
        // Removable singularity at 0: (1/t) I1(b t) = sqrt(lm) * sum_m (lm t^2)^m / (m!(m+1)!),
        // of which three terms are far more than enough below 1e-6.
        const double z = lm * t * t;
        const double series = 1.0 + 0.5 * z * (1.0 + z / 6.0);
        return pref_ * std::sqrt(lm) *
               std::exp(-(params_.lambda + params_.mu) * t) * series;
    }
    // exp(-(lambda+mu)t) I1(bt) == exp(-gap t) * [exp(-bt) I1(bt)]: same math,
    // but this form survives arbitrarily large t.
    return pref_ / t * std::exp(-gap_ * t) * bessel_i1_scaled(bsc_ * t, switch_point_);
}

double AnalyticLaw::log_busy_density(double t) const {
    if (!(t >= 0.0)) throw validation_error("log_busy_density: t must be nonnegative");
    if (t <= 1e-6) return std::log(busy_density(t));
    return std::log(pref_) - std::log(t) - gap_ * t +
           std::log(bessel_i1_scaled(bsc_ * t, switch_point_));
}

double AnalyticLaw::busy_cdf_series(double x) const {
    if (!(x >= 0.0)) throw validation_error("busy_cdf_series: x must be nonnegative");
    const double total = std::min(1.0, params_.mu / params_.lambda);
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return total;

    const double a = params_.lambda + params_.mu;
    const double y = a * x;
    const double ratio = params_.lambda * params_.mu / (a * a);

    // Below ~650, e_j = y^j e^{-y} / j! is safe to step multiplicatively.
    // Above it, e^{-y} underflows along the way even though individual e_j do
    // not, so every e_j is formed in log space instead.
    const bool log_space = y > 650.0;
    double e = log_space ? 0.0 : std::exp(-y);
    std::uint64_t j = 0;  // e currently holds e_j
    const auto advance_e = [&]() {
        ++j;
        if (log_space)
            e = std::exp(static_cast<double>(j) * std::log(y) - y -
                         std::lgamma(static_cast<double>(j) + 1.0));
        else
            e *= y / static_cast<double>(j);
    };

    double p = -std::expm1(-y);  // P(1, y)
    if (log_space) p = 1.0;      // e^{-y} is below denormal range here
    double c = params_.mu / a;   // c_0
    double mass_used = 0.0;
    double sum = 0.0;

    constexpr std::uint64_t kBudget = 2'000'000;
    for (std::uint64_t m = 0;; ++m) {
        sum += c * p;
        mass_used += c;
        // Step the regularized gamma P(2m+1, y) -> P(2m+3, y) by peeling two
        // Poisson masses, and the coefficient c_m -> c_{m+1}.
        advance_e();  // e_{2m+1}
        p -= e;
        advance_e();  // e_{2m+2}
        p -= e;
        if (p < 0.0) p = 0.0;
        c *= ratio * ((2.0 * m + 1.0) * (2.0 * m + 2.0)) /
             ((static_cast<double>(m) + 1.0) * (static_cast<double>(m) + 2.0));

        // Every remaining term has P(2j+1, y) <= P(2m+3, y), and the
        // remaining coefficients sum to (total - mass_used).
        const double bound = p * std::max(0.0, total - mass_used);
        if (bound < series_tol_) break;
        if (m >= kBudget)
            throw resource_error("busy_cdf_series: truncation budget exhausted at bound " +
                                 std::to_string(bound));
    }
    return std::min(sum, total);
}

double AnalyticLaw::density_integral(double x, double s) const {
    if (!(x >= 0.0)) throw validation_error("density_integral: x must be nonnegative");
    if (!(s >= 0.0)) throw validation_error("density_integral: s must be nonnegative");
    if (x == 0.0) return 0.0;

    const auto integrand = [this, s](double t) {
        return busy_density(t) * std::exp(-s * t);
    };

    if (std::isfinite(x)) {
        double err;
        return gk15::integrate(integrand, 0.0, x, 15, quad_tol_, &err);
    }

    // Improper integral: a finite head plus an algebraic-tail-safe remainder.
    // The integrand decays like e^{-r t} with r = gap + s; at the critical
    // point r = 0 it decays like t^{-3/2}, which the substitution u = t^{-1/2}
    // turns into a bounded smooth integrand near u = 0:
    //   integral_X^inf g(t) dt = integral_0^{1/sqrt(X)} g(1/u^2) * 2 u^{-3} du.
    const double r = gap_ + s;
    const double cut = r > 0.035 ? std::min(1200.0, std::max(30.0, 42.0 / r)) : 400.0;
    double err;
    const double head = gk15::integrate(integrand, 0.0, cut, 15, quad_tol_, &err);
    const auto tail_integrand = [this, s](double u) {
        if (u <= 0.0) return 0.0;
        const double t = 1.0 / (u * u);
        const double lg =
            log_busy_density(t) - s * t + std::log(2.0) - 3.0 * std::log(u);
        return std::exp(lg);
    };
    const double tail =
        gk15::integrate(tail_integrand, 0.0, 1.0 / std::sqrt(cut), 15, quad_tol_, &err);
    return head + tail;
}

double AnalyticLaw::limiting_cdf(double m, double x) const {
    if (!(m >= 1.0)) throw validation_error("limiting_cdf: m must be at least 1");
    if (!params_.finite_deadline())
        throw validation_error("limiting_cdf needs a finite deadline");
    if (std::isnan(x)) throw validation_error("limiting_cdf: x is NaN");
    if (x < 0.0) return 0.0;
    if (x >= params_.deadline) return 1.0;

    // Atom 1/m at zero (the regeneration share), plus the busy-period mass
    // scaled by (1 - 1/m) / max(rho, 1), normalized so the deadline maps to 1.
    const double weight = (1.0 - 1.0 / m) / std::max(params_.rho(), 1.0);
    const double bracket = 1.0 / m + weight * density_integral(x);
    const double norm = 1.0 / m + weight * density_integral(params_.deadline);
    return std::min(1.0, bracket / norm);
}

double laplace_gamma(const Parameters& params, double s) {
    validate(params);
    if (!(s > 0.0)) throw validation_error("laplace_gamma needs s > 0");
    // (a - sqrt(a^2 - 4 lm)) / (2 lambda) without the subtractive cancellation:
    // multiply through by the conjugate.
    const double a = params.lambda + params.mu + s;
    const double lm = params.lambda * params.mu;
    return 2.0 * params.mu / (a + std::sqrt(a * a - 4.0 * lm));
}

}  // namespace rql
