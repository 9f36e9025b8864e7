#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rql/params.hpp"

namespace rql {

// Final record of one customer. wait == +infinity means the customer's
// patience ran out and they left unserved; exactly those customers have no
// service_start and no served_rank.
struct CustomerOutcome {
    std::uint64_t index = 0;
    double arrival_time = 0.0;
    double wait = 0.0;
    std::optional<double> service_start;
    std::optional<std::uint64_t> served_rank;  // m: this customer was served m-th

    bool served() const noexcept { return served_rank.has_value(); }
};

struct SamplePath {
    Parameters params;
    std::vector<CustomerOutcome> outcomes;
    // (time, number in system) after every event; recorded only when tracing.
    std::vector<std::pair<double, std::uint64_t>> queue_length_trace;
    std::vector<double> served_waits;  // finite waits, in order of service
    std::string warning;               // nonempty when the run was truncated
    bool hit_event_ceiling = false;
};

// W_m for served ranks m >= burn_in, in order of service.
std::vector<double> served_waits(const SamplePath& path, std::uint64_t burn_in);

// Fraction of customers with index >= burn_in whose wait was zero.
double zero_wait_fraction(const SamplePath& path, std::uint64_t burn_in);

}  // namespace rql
