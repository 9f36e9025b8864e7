#include "rql/params.hpp"

#include <cmath>

#include "rql/errors.hpp"

namespace rql {

const Parameters& validate(const Parameters& params) {
    if (!std::isfinite(params.lambda) || !(params.lambda > 0.0))
        throw validation_error("lambda must be a positive finite rate");
    if (!std::isfinite(params.mu) || !(params.mu > 0.0))
        throw validation_error("mu must be a positive finite rate");
    // +infinity is allowed (no reneging); NaN and anything <= 0 are not.
    if (!(params.deadline > 0.0))
        throw validation_error("deadline must be positive (or inf for no reneging)");
    return params;
}

}  // namespace rql
