#pragma once

namespace rql {

// Modified Bessel function of the first kind, order one. Power series below
// switch_point, asymptotic expansion (summed to its smallest term) at and
// above it. The defaults keep both branches well under 1e-12 relative error
// where they meet.
double bessel_i1(double t, double switch_point = 20.0);

// exp(-t) * I1(t): the overflow-safe form. bessel_i1 itself overflows to
// +infinity for t beyond ~709 like exp does; use this one at large t.
double bessel_i1_scaled(double t, double switch_point = 20.0);

}  // namespace rql
