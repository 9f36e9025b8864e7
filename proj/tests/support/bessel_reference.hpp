#pragma once

// Arbitrary-precision oracle for the modified Bessel function I_1, evaluated
// through MPFR at ~320 bits from the ascending series alone. The production
// code switches to an asymptotic expansion for large arguments; this oracle
// never does, which is what makes the comparison meaningful.

namespace testsupport {

// I_1(t) correctly rounded to double. t must be >= 0 and modest enough that
// e^t is representable (t <= ~700 keeps everything finite in double).
double bessel_i1_reference(double t);

// e^{-t} I_1(t) correctly rounded to double.
double bessel_i1_scaled_reference(double t);

}  // namespace testsupport
