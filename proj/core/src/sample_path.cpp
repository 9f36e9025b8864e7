#include "rql/sample_path.hpp"

namespace rql {

std::vector<double> served_waits(const SamplePath& path, std::uint64_t burn_in) {
    // served_waits[m] in the path is the wait of the customer with rank m,
    // already in service order; slicing by rank is a suffix.
    if (burn_in >= path.served_waits.size()) return {};
    return {path.served_waits.begin() + static_cast<std::ptrdiff_t>(burn_in),
            path.served_waits.end()};
}

double zero_wait_fraction(const SamplePath& path, std::uint64_t burn_in) {
    std::uint64_t seen = 0, zero = 0;
    for (const auto& o : path.outcomes) {
        if (o.index < burn_in) continue;
        ++seen;
        if (o.wait == 0.0) ++zero;
    }
    if (seen == 0) return 0.0;
    return static_cast<double>(zero) / static_cast<double>(seen);
}

}  // namespace rql
