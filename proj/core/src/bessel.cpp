#include "rql/bessel.hpp"

#include <cmath>
#include <limits>

#include "rql/errors.hpp"

namespace rql {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// sum_m (t/2)^{2m+1} / (m! (m+1)!). Terms grow until m ~ t/2 and then die
// factorially; the relative stop test cannot fire during the growth phase.
double i1_series(double t) {
    const double q = 0.25 * t * t;
    double term = 0.5 * t;
    double sum = term;
    for (int m = 1; m < 1000; ++m) {
        term *= q / (static_cast<double>(m) * (m + 1.0));
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return sum;
}

// The bracket of the large-argument expansion
//   I1(t) = e^t / sqrt(2 pi t) * [1 - 3/(8t) - 15/(128 t^2) - ...],
// summed to its smallest term: term_k = term_{k-1} * ((2k-1)^2 - 4) / (8 k t).
double i1_asymptotic_bracket(double t) {
    double term = 1.0;
    double sum = 1.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 60; ++k) {
        const double two_k_minus_1 = 2.0 * k - 1.0;
        term *= (two_k_minus_1 * two_k_minus_1 - 4.0) / (8.0 * k * t);
        if (std::abs(term) >= prev) break;  // divergent part reached
        sum += term;
        prev = std::abs(term);
        if (prev < 1e-17 * sum) break;
    }
    return sum;
}

void check_argument(double t) {
    if (!(t >= 0.0)) throw validation_error("bessel_i1: argument must be nonnegative");
}

}  // namespace

double bessel_i1(double t, double switch_point) {
    check_argument(t);
    if (t == 0.0) return 0.0;
    if (t < switch_point) return i1_series(t);
    // Overflows to +inf past t ~ 709, exactly as exp does; callers needing
    // large arguments use the scaled form.
    return std::exp(t) / std::sqrt(kTwoPi * t) * i1_asymptotic_bracket(t);
}

double bessel_i1_scaled(double t, double switch_point) {
    check_argument(t);
    if (t == 0.0) return 0.0;
    if (t < switch_point) return i1_series(t) * std::exp(-t);
    return i1_asymptotic_bracket(t) / std::sqrt(kTwoPi * t);
}

}  // namespace rql
