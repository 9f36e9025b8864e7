#include "rql/streams.hpp"

#include "rql/errors.hpp"
#include "rql/rng.hpp"

namespace rql {
namespace {

constexpr std::uint64_t kArrivalTag = 0;
constexpr std::uint64_t kServiceTag = 1;
constexpr std::uint64_t kBlock = 1024;

std::uint64_t round_up_block(std::uint64_t n) {
    return (n + kBlock - 1) / kBlock * kBlock;
}

// Appends draws [old, count) and keeps the running prefix sum going from
// where it stopped, so a later extension reproduces exactly the values an
// up-front generation would have produced.
void extend(std::vector<double>& draws, std::vector<double>& partials, std::uint64_t count,
            CounterRng rng, double rate) {
    const std::uint64_t old = draws.size();
    draws.resize(count);
    partials.resize(count);
    double sum = old == 0 ? 0.0 : partials[old - 1];
    for (std::uint64_t i = old; i < count; ++i) {
        draws[i] = rng.exponential(i, rate);
        sum += draws[i];
        partials[i] = sum;
    }
}

}  // namespace

void Streams::ensure_arrivals(std::uint64_t count) {
    if (count <= interarrivals.size()) return;
    if (!extendable) throw resource_error("fixed stream exhausted: arrivals");
    extend(interarrivals, arrival_times, round_up_block(count),
           CounterRng{derive_stream(seed, kArrivalTag)}, lambda);
}

void Streams::ensure_services(std::uint64_t count) {
    if (count <= service_durations.size()) return;
    if (!extendable) throw resource_error("fixed stream exhausted: services");
    extend(service_durations, service_partials, round_up_block(count),
           CounterRng{derive_stream(seed, kServiceTag)}, mu);
}

Streams gen_streams(const Parameters& params, std::uint64_t n_arrivals,
                    std::uint64_t n_services, std::uint64_t seed) {
    validate(params);
    if (n_arrivals < 1 || n_services < 1)
        throw validation_error("stream lengths must be at least 1");
    Streams s;
    s.lambda = params.lambda;
    s.mu = params.mu;
    s.seed = seed;
    extend(s.interarrivals, s.arrival_times, n_arrivals,
           CounterRng{derive_stream(seed, kArrivalTag)}, params.lambda);
    extend(s.service_durations, s.service_partials, n_services,
           CounterRng{derive_stream(seed, kServiceTag)}, params.mu);
    return s;
}

}  // namespace rql
