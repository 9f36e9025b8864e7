#include "rql/regeneration.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <mutex>
#include <thread>

#include "rql/errors.hpp"
#include "rql/rng.hpp"
#include "rql/stats.hpp"

namespace rql {

RegenerationResult regeneration_by_index_sets(Streams& streams, double deadline,
                                              const RegenerationOptions& options) {
    if (!(deadline > 0.0)) throw validation_error("deadline must be positive");

    RegenerationResult res;
    // Waiter indices in arrival order; since the deadline is the same for
    // everyone, expiries increase front to back, and the most recent arrival
    // (the one a freed server picks) sits at the back.
    std::deque<std::uint64_t> eligible;
    std::uint64_t next_arrival = 1;
    std::uint64_t last_arrival = 0;

    for (std::uint64_t k = 1; k <= options.max_services; ++k) {
        const double horizon = streams.service_partial(k);

        RegenerationStep step;
        if (options.record_trace) step.service_index = k;

        // Everyone arriving before the k-th service ends joins the pool.
        while (streams.arrival_time(next_arrival) < horizon) {
            eligible.push_back(next_arrival);
            last_arrival = next_arrival;
            if (options.record_trace) step.new_arrivals.push_back(next_arrival);
            ++next_arrival;
        }
        // Strict survival: a waiter whose patience ends exactly at the
        // horizon is gone. Arrivals are increasing, so expired ones form a
        // prefix of the pool.
        while (!eligible.empty() &&
               !(streams.arrival_time(eligible.front()) + deadline > horizon)) {
            eligible.pop_front();
        }

        if (options.record_trace)
            step.survivors.assign(eligible.begin(), eligible.end());

        if (eligible.empty()) {
            res.determined = true;
            res.empty_step = k;
            res.last_arrival = last_arrival;
            res.return_index = last_arrival + 1;
            res.services_used = k;
            if (options.record_trace) res.trace.push_back(std::move(step));
            return res;
        }

        // The freed server takes the most recent survivor into service k+1.
        if (options.record_trace) step.selected = eligible.back();
        eligible.pop_back();
        if (options.record_trace) res.trace.push_back(std::move(step));
    }

    res.determined = false;
    res.last_arrival = last_arrival;
    res.services_used = options.max_services;
    return res;
}

double empty_window_probability(const Parameters& params) {
    validate(params);
    if (!params.finite_deadline())
        throw validation_error("empty_window_probability needs a finite deadline");
    const double a = params.lambda + params.mu;
    return params.mu / a * std::exp(-a * params.deadline);
}

double mean_services_to_empty_window(const Parameters& params) {
    validate(params);
    if (!params.finite_deadline())
        throw validation_error("mean_services_to_empty_window needs a finite deadline");
    const double a = params.lambda + params.mu;
    return a / params.mu * std::exp(a * params.deadline);
}

double ReturnLawEstimate::variance() const {
    // Kahan-compensated so the reported moments do not depend on map order
    // rounding; the masses are tiny and many.
    double sum = 0.0, comp = 0.0;
    for (const auto& [k, mass] : pmf) {
        const double kd = static_cast<double>(k);
        const double term = (kd - mean) * (kd - mean) * mass;
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

namespace {

std::uint64_t one_return_draw(const Parameters& params, std::uint64_t rep_seed,
                              std::uint64_t max_services) {
    Streams streams = gen_streams(params, 1, 1, rep_seed);
    RegenerationOptions opt;
    opt.max_services = max_services;
    const RegenerationResult res = regeneration_by_index_sets(streams, params.deadline, opt);
    if (!res.determined)
        throw resource_error(
            "a replication exceeded max_services_per_replication before the system "
            "emptied; raise the ceiling");
    return res.return_index;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

ReturnLawEstimate estimate_return_law(const Parameters& params, std::uint64_t replications,
                                      std::uint64_t seed, double confidence,
                                      const EstimateOptions& options) {
    validate(params);
    if (!params.finite_deadline() && !(params.lambda < params.mu))
        throw validation_error(
            "deadline = inf needs lambda < mu for the system to empty again");
    if (replications < 2) throw validation_error("need at least 2 replications");
    if (!(confidence >= 0.0) || !(confidence < 1.0))
        throw validation_error("confidence must lie in [0, 1)");

    // Replication i is a pure function of (seed, i): storage is per-index,
    // so the estimate is bit-identical for any thread count.
    std::vector<std::uint64_t> draws(replications);
    const unsigned threads = std::max(1u, options.threads);
    if (threads == 1) {
        for (std::uint64_t i = 0; i < replications; ++i)
            draws[i] = one_return_draw(params, derive_stream(seed, i),
                                       options.max_services_per_replication);
    } else {
        std::vector<std::thread> pool;
        std::exception_ptr first_error;
        std::mutex error_mutex;
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::uint64_t i = w; i < replications; i += threads)
                        draws[i] = one_return_draw(params, derive_stream(seed, i),
                                                   options.max_services_per_replication);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    ReturnLawEstimate est;
    est.confidence = confidence;
    est.replications = replications;

    // Integer sum: exact, and trivially independent of summation order.
    unsigned long long total = 0;
    std::map<std::uint64_t, std::uint64_t> counts;
    for (const std::uint64_t tau : draws) {
        total += tau;
        ++counts[tau];
    }
    est.mean = static_cast<double>(total) / static_cast<double>(replications);
    const double n = static_cast<double>(replications);
    for (const auto& [k, c] : counts) est.pmf[k] = static_cast<double>(c) / n;

    const double z = normal_quantile(0.5 * (1.0 + confidence));
    if (options.median_of_means_blocks > 0) {
        const std::uint64_t blocks =
            std::min<std::uint64_t>(options.median_of_means_blocks, replications);
        std::vector<double> block_means;
        block_means.reserve(blocks);
        for (std::uint64_t b = 0; b < blocks; ++b) {
            const std::uint64_t lo = replications * b / blocks;
            const std::uint64_t hi = replications * (b + 1) / blocks;
            unsigned long long s = 0;
            for (std::uint64_t i = lo; i < hi; ++i) s += draws[i];
            block_means.push_back(static_cast<double>(s) / static_cast<double>(hi - lo));
        }
        est.mean = median_of(block_means);
        if (blocks >= 2) {
            const auto [bm, half] = mean_ci(block_means, confidence);
            (void)bm;
            est.ci_half_width = half;
        }
    } else {
        // Unbiased sample variance from the exact counts.
        double var = 0.0, comp = 0.0;
        for (const auto& [k, c] : counts) {
            const double d = static_cast<double>(k) - est.mean;
            const double term = d * d * static_cast<double>(c);
            const double y = term - comp;
            const double t = var + y;
            comp = (t - var) - y;
            var = t;
        }
        var /= (n - 1.0);
        est.ci_half_width = z * std::sqrt(var / n);
    }
    return est;
}

BusyPeriodSample busy_period_on(Streams& streams, std::uint64_t ceiling) {
    BusyPeriodSample sample;
    for (std::uint64_t n = 1; n <= ceiling; ++n) {
        // The system opened by customer 0 empties at the first n whose
        // cumulative service time ends before arrival n shows up.
        if (streams.service_partial(n) < streams.arrival_time(n)) {
            sample.duration = streams.service_partial(n);
            sample.services = n;
            sample.truncated = false;
            return sample;
        }
    }
    sample.duration = std::numeric_limits<double>::infinity();
    sample.services = 0;
    sample.truncated = true;
    return sample;
}

BusyPeriodSample sample_busy_period(const Parameters& params, std::uint64_t seed,
                                    std::uint64_t ceiling) {
    validate(params);
    Streams streams = gen_streams(params, 1, 1, seed);
    return busy_period_on(streams, ceiling);
}

}  // namespace rql
