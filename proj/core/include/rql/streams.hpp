#pragma once

#include <cstdint>
#include <vector>

#include "rql/params.hpp"

namespace rql {

// The randomness of one experiment: interarrival gaps X_n, service durations
// Y_k, and their prefix sums (arrival instants S^X_n and cumulative service
// time S^Y_k). Sequences extend on demand in blocks of 1024 draws; each draw
// is a pure function of (seed, index), so extension never perturbs values
// that were already materialized.
//
// Customer indices start at 1 for the arrival process; customer 0 opens the
// system at time 0 and has no interarrival draw of its own.
struct Streams {
    double lambda = 1.0;
    double mu = 1.0;
    std::uint64_t seed = 0;
    bool extendable = true;  // false for hand-built fixtures: exhaustion throws

    std::vector<double> interarrivals;      // X_n, n >= 1 (stored at n-1)
    std::vector<double> service_durations;  // Y_k, k >= 1 (stored at k-1)
    std::vector<double> arrival_times;      // S^X_n = X_1 + ... + X_n
    std::vector<double> service_partials;   // S^Y_k = Y_1 + ... + Y_k

    double arrival_time(std::uint64_t n) {
        if (n == 0) return 0.0;
        ensure_arrivals(n);
        return arrival_times[n - 1];
    }
    double service_partial(std::uint64_t k) {
        ensure_services(k);
        return service_partials[k - 1];
    }
    double service_duration(std::uint64_t k) {
        ensure_services(k);
        return service_durations[k - 1];
    }

    void ensure_arrivals(std::uint64_t count);
    void ensure_services(std::uint64_t count);
};

// Fresh streams for params: i.i.d. exponential interarrivals at rate lambda
// and service durations at rate mu, from two independent substreams of seed.
// Calling twice with the same arguments gives bit-identical streams, and a
// longer request shares every draw with a shorter one as a prefix.
Streams gen_streams(const Parameters& params, std::uint64_t n_arrivals,
                    std::uint64_t n_services, std::uint64_t seed);

}  // namespace rql
