#pragma once

#include <cstdint>

#include "rql/sample_path.hpp"
#include "rql/streams.hpp"

namespace rql {

struct SimulateOptions {
    // Record (time, N_t) after every event. Forces eager abandonment so the
    // count drops exactly at expiry instants.
    bool record_trace = false;
    // Schedule each abandonment as its own event instead of filtering expired
    // waiters when the server frees up. Outcomes are identical either way;
    // only the trace needs it.
    bool eager_abandonment = false;
    std::uint64_t max_events = 0;  // 0 = 64*n_customers + 2^22
};

// Event-driven run of the queue: deadline reneging, and a freed server always
// picks the most recent arrival that is still within patience (last in,
// first out; non-preemptive; no reentry). Customers 0..n_customers-1 are
// tracked; arrivals keep coming beyond them until every tracked customer is
// resolved, so late arrivals can overtake exactly as they would in the
// unbounded process.
//
// With deadline == +inf and lambda > mu the system is transient: the run
// stops at the last tracked arrival, still-waiting customers are recorded as
// never served, and a warning is attached.
SamplePath simulate(const Parameters& params, std::uint64_t n_customers, std::uint64_t seed,
                    const SimulateOptions& options = {});

// Same, on externally provided streams (extended on demand).
SamplePath simulate_on(const Parameters& params, Streams& streams, std::uint64_t n_customers,
                       const SimulateOptions& options = {});

// Index of the first customer n >= 1 that arrives to find the system empty,
// replaying the same streams the index-set construction reads. Throws
// resource_error if max_events elapse first.
std::uint64_t first_zero_wait_index(const Parameters& params, Streams& streams,
                                    std::uint64_t max_events = 400'000'000);

}  // namespace rql
