#pragma once

#include <cmath>
#include <limits>

namespace rql {

// One experiment: arrival rate, service rate, patience deadline. A customer
// that has waited exactly `deadline` leaves unserved. deadline may be
// +infinity, which runs the classical system without reneging.
struct Parameters {
    double lambda = 1.0;  // arrival rate
    double mu = 1.0;      // service rate
    double deadline = std::numeric_limits<double>::infinity();

    double rho() const noexcept { return lambda / mu; }
    bool finite_deadline() const noexcept { return std::isfinite(deadline); }
};

// Returns params unchanged when valid; throws validation_error naming the
// offending field otherwise.
const Parameters& validate(const Parameters& params);

}  // namespace rql
