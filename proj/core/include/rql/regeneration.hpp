#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "rql/params.hpp"
#include "rql/streams.hpp"

namespace rql {

// One step of the index-set recursion: what happened during service k of the
// initial busy run.
struct RegenerationStep {
    std::uint64_t service_index = 0;           // k
    std::vector<std::uint64_t> new_arrivals;   // customers arriving during service k
    std::vector<std::uint64_t> survivors;      // waiters still within patience afterwards
    std::uint64_t selected = 0;                // the one taken into service next (0 = none)
};

// Outcome of the index-set walk. The walk follows consecutive services from
// time 0 and keeps the set of waiters whose patience outlives the current
// cumulative service time; the first time that set is empty the server goes
// idle, and the next customer to arrive waits zero -- the system regenerates.
struct RegenerationResult {
    bool determined = false;
    std::uint64_t empty_step = 0;    // first service index with no surviving waiter
    std::uint64_t last_arrival = 0;  // largest arrival index seen until then (0 = none)
    std::uint64_t return_index = 0;  // first zero-wait customer: last_arrival + 1
    std::uint64_t services_used = 0;
    std::vector<RegenerationStep> trace;
};

struct RegenerationOptions {
    std::uint64_t max_services = 50'000'000;
    bool record_trace = false;
};

// Runs the recursion on the given streams. Works for any deadline, including
// +infinity (then nobody reneges and the walk is the classical hunt for an
// idle instant -- only sensible when lambda < mu).
RegenerationResult regeneration_by_index_sets(Streams& streams, double deadline,
                                              const RegenerationOptions& options = {});

// P(one service window is at least the deadline long and sees no arrival):
// the per-service success probability of the geometric hunt for an instant
// where every waiter has expired. Finite deadline only.
double empty_window_probability(const Parameters& params);

// Expected number of services until such a window: the reciprocal of the
// probability above. Grows like exp((lambda+mu)*deadline).
double mean_services_to_empty_window(const Parameters& params);

// Monte-Carlo estimate of the law of the return index.
struct ReturnLawEstimate {
    double mean = 0.0;           // estimate of the expected return index
    double ci_half_width = 0.0;  // normal-approximation half width at `confidence`
    double confidence = 0.99;
    std::uint64_t replications = 0;
    std::map<std::uint64_t, double> pmf;  // empirical mass of each return index

    // sum_k k^2 pmf[k] - mean^2, for downstream error budgets.
    double variance() const;
};

struct EstimateOptions {
    std::uint64_t max_services_per_replication = 50'000'000;
    unsigned threads = 1;
    // > 0 switches the point estimate to the median of that many block means
    // (sturdier against stragglers); the half width then comes from the
    // spread of the block means.
    unsigned median_of_means_blocks = 0;
};

// Independent replications of the index-set walk. Replication i uses the
// stream key derive_stream(seed, i), so results do not depend on the thread
// count and any subset can be reproduced in isolation. A replication that
// hits the service ceiling throws resource_error: an undetermined draw must
// raise the ceiling, never pass silently.
ReturnLawEstimate estimate_return_law(const Parameters& params, std::uint64_t replications,
                                      std::uint64_t seed, double confidence = 0.99,
                                      const EstimateOptions& options = {});

// One draw of the initial busy period: the cumulative service time first
// exceeded by the next arrival gap.
struct BusyPeriodSample {
    double duration = 0.0;         // +infinity when truncated
    std::uint64_t services = 0;    // how many services the busy run contained
    bool truncated = false;        // hit the ceiling before the system emptied
};

BusyPeriodSample sample_busy_period(const Parameters& params, std::uint64_t seed,
                                    std::uint64_t ceiling = 1'000'000);

// Same walk on externally provided streams (for fixtures).
BusyPeriodSample busy_period_on(Streams& streams, std::uint64_t ceiling = 1'000'000);

}  // namespace rql
