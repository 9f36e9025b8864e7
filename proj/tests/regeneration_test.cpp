#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "doctest.h"
#include "rql/errors.hpp"
#include "rql/regeneration.hpp"
#include "rql/rng.hpp"
#include "rql/simulator.hpp"
#include "rql/stats.hpp"
#include "rql/streams.hpp"

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

rql::Parameters make_params(double lambda, double mu, double deadline) {
    rql::Parameters p;
    p.lambda = lambda;
    p.mu = mu;
    p.deadline = deadline;
    return p;
}

rql::Streams fixture(std::vector<double> gaps, std::vector<double> services) {
    rql::Streams s;
    s.extendable = false;
    double acc = 0.0;
    for (const double g : gaps) {
        s.interarrivals.push_back(g);
        acc += g;
        s.arrival_times.push_back(acc);
    }
    acc = 0.0;
    for (const double y : services) {
        s.service_durations.push_back(y);
        acc += y;
        s.service_partials.push_back(acc);
    }
    return s;
}

}  // namespace

TEST_CASE("a lone opening service with nobody waiting regenerates at once") {
    rql::Streams s = fixture({2.0}, {1.0});
    const rql::RegenerationResult res = rql::regeneration_by_index_sets(s, 0.5);
    REQUIRE(res.determined);
    CHECK(res.empty_step == 1);
    CHECK(res.last_arrival == 0);
    CHECK(res.return_index == 1);
    CHECK(res.services_used == 1);
}

TEST_CASE("hand-walked example: both waiters expire during the opening service") {
    // arrivals at 0.2 and 0.7, patience 0.3, first service ends at 1.0:
    // expiries 0.5 and 1.0 are both <= 1.0, so the pool is already empty.
    rql::Streams s = fixture({0.2, 0.5, 2.0}, {1.0, 0.1});
    rql::RegenerationOptions opt;
    opt.record_trace = true;
    const rql::RegenerationResult res = rql::regeneration_by_index_sets(s, 0.3, opt);
    REQUIRE(res.determined);
    CHECK(res.empty_step == 1);
    CHECK(res.last_arrival == 2);
    CHECK(res.return_index == 3);
    REQUIRE(res.trace.size() == 1);
    CHECK(res.trace[0].service_index == 1);
    CHECK(res.trace[0].new_arrivals == std::vector<std::uint64_t>{1, 2});
    CHECK(res.trace[0].survivors.empty());
    CHECK(res.trace[0].selected == 0);

    // the event-driven engine, fed the same numbers, finds the same customer
    rql::Streams s2 = fixture({0.2, 0.5, 2.0}, {1.0, 0.1});
    const auto p = make_params(1.0, 1.0, 0.3);
    CHECK(rql::first_zero_wait_index(p, s2, 1000) == 3);
}

TEST_CASE("hand-walked example: three services, one expiry, then empty") {
    rql::Streams s = fixture({0.2, 0.3, 0.6, 5.0}, {1.0, 0.6, 0.5, 2.0});
    const double deadline = 0.9;
    rql::RegenerationOptions opt;
    opt.record_trace = true;
    const rql::RegenerationResult res = rql::regeneration_by_index_sets(s, deadline, opt);
    REQUIRE(res.determined);
    CHECK(res.empty_step == 3);
    CHECK(res.last_arrival == 3);
    CHECK(res.return_index == 4);
    REQUIRE(res.trace.size() == 3);
    CHECK(res.trace[0].new_arrivals == std::vector<std::uint64_t>{1, 2});
    CHECK(res.trace[0].survivors == std::vector<std::uint64_t>{1, 2});
    CHECK(res.trace[0].selected == 2);  // most recent survivor takes service 2
    CHECK(res.trace[1].new_arrivals == std::vector<std::uint64_t>{3});
    CHECK(res.trace[1].survivors == std::vector<std::uint64_t>{3});  // 1 expired at 1.1
    CHECK(res.trace[1].selected == 3);
    CHECK(res.trace[2].new_arrivals.empty());
    CHECK(res.trace[2].survivors.empty());

    // engine agreement, including every wait on the way
    rql::Streams s2 = fixture({0.2, 0.3, 0.6, 5.0}, {1.0, 0.6, 0.5, 2.0});
    const auto p = make_params(1.0, 1.0, deadline);
    const rql::SamplePath path = rql::simulate_on(p, s2, 5, {});
    CHECK(path.outcomes[0].wait == 0.0);
    CHECK(path.outcomes[1].wait == kInf);  // reneged at 1.1
    CHECK(path.outcomes[2].wait == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(path.outcomes[3].wait == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(path.outcomes[4].wait == 0.0);  // the regeneration customer
    CHECK(*path.outcomes[4].served_rank == 3);
}

TEST_CASE("index-set walk and event engine name the same return customer") {
    const std::uint64_t meta = 777000;
    const rql::CounterRng box{rql::derive_stream(meta, 0)};
    for (std::uint64_t i = 0; i < 300; ++i) {
        const auto p = make_params(0.2 + 2.8 * box.uniform(3 * i),
                                   0.2 + 2.8 * box.uniform(3 * i + 1),
                                   0.1 + 2.9 * box.uniform(3 * i + 2));
        const std::uint64_t seed = rql::derive_stream(meta, 10000 + i);

        rql::Streams sa = rql::gen_streams(p, 1, 1, seed);
        const rql::RegenerationResult res = rql::regeneration_by_index_sets(sa, p.deadline);
        REQUIRE(res.determined);

        rql::Streams sb = rql::gen_streams(p, 1, 1, seed);
        CHECK(res.return_index == rql::first_zero_wait_index(p, sb));
    }
}

TEST_CASE("empty-window probability: frozen value, small-deadline limit, simulation") {
    // lambda = mu = 1, deadline = 1: (1/2) e^{-2}
    const auto p = make_params(1.0, 1.0, 1.0);
    CHECK(rql::empty_window_probability(p) ==
          doctest::Approx(0.06766764161830635).epsilon(1e-14));
    // reciprocal relationship, several parameter sets
    for (const auto& q : {make_params(1.0, 1.0, 1.0), make_params(0.4, 2.2, 0.6),
                          make_params(3.0, 0.3, 1.7)}) {
        CHECK(rql::empty_window_probability(q) * rql::mean_services_to_empty_window(q) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    // deadline -> 0 limit is the chance a service outlasts the next gap
    const auto tiny = make_params(1.0, 1.0, 1e-12);
    CHECK(rql::empty_window_probability(tiny) == doctest::Approx(0.5).epsilon(1e-9));

    // Monte-Carlo: a window succeeds when the service lasts past the deadline
    // and the next arrival gap outlasts the whole service
    for (const auto& q : {make_params(1.0, 1.0, 1.0), make_params(0.5, 1.5, 0.7)}) {
        const rql::CounterRng gx{rql::derive_stream(314, 0)};
        const rql::CounterRng gy{rql::derive_stream(314, 1)};
        const std::uint64_t trials = 200000;
        std::uint64_t hits = 0;
        for (std::uint64_t i = 0; i < trials; ++i) {
            const double x = gx.exponential(i, q.lambda);
            const double y = gy.exponential(i, q.mu);
            if (y >= q.deadline && x > y) ++hits;
        }
        const double prob = rql::empty_window_probability(q);
        const double freq = static_cast<double>(hits) / static_cast<double>(trials);
        const double se = std::sqrt(prob * (1.0 - prob) / static_cast<double>(trials));
        CHECK(std::abs(freq - prob) < 4.0 * se);
    }

    CHECK_THROWS_AS(rql::empty_window_probability(make_params(1.0, 1.0, kInf)),
                    rql::validation_error);
    CHECK_THROWS_AS(rql::mean_services_to_empty_window(make_params(1.0, 1.0, kInf)),
                    rql::validation_error);
}

TEST_CASE("mean services to an empty window at the critical unit point") {
    const auto p = make_params(1.0, 1.0, 1.0);
    CHECK(rql::mean_services_to_empty_window(p) ==
          doctest::Approx(14.7781121978613).epsilon(1e-12));  // 2 e^2
}

TEST_CASE("return-law estimate: pmf closes, moments cohere, threads do not matter") {
    const auto p = make_params(1.0, 1.0, 1.0);
    const rql::ReturnLawEstimate est = rql::estimate_return_law(p, 20000, 99);

    double mass = 0.0, mean_from_pmf = 0.0;
    for (const auto& [k, q] : est.pmf) {
        CHECK(k >= 1);
        CHECK(q > 0.0);
        mass += q;
        mean_from_pmf += static_cast<double>(k) * q;
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mean_from_pmf == doctest::Approx(est.mean).epsilon(1e-9));
    CHECK(est.variance() >= 0.0);
    CHECK(est.replications == 20000);
    CHECK(est.ci_half_width > 0.0);

    // bit-identical under replay and under a different thread count
    const rql::ReturnLawEstimate again = rql::estimate_return_law(p, 20000, 99);
    CHECK(again.mean == est.mean);
    CHECK(again.ci_half_width == est.ci_half_width);
    CHECK(again.pmf == est.pmf);

    rql::EstimateOptions four;
    four.threads = 4;
    const rql::ReturnLawEstimate wide = rql::estimate_return_law(p, 20000, 99, 0.99, four);
    CHECK(wide.mean == est.mean);
    CHECK(wide.ci_half_width == est.ci_half_width);
    CHECK(wide.pmf == est.pmf);
}

TEST_CASE("mean return index at the unit critical point sits under e^2") {
    const auto p = make_params(1.0, 1.0, 1.0);
    const rql::ReturnLawEstimate est = rql::estimate_return_law(p, 20000, 424243);
    CHECK(est.mean + est.ci_half_width < std::exp(2.0));
    CHECK(est.mean > 1.0);
}

TEST_CASE("median-of-means stays consistent with the plain mean") {
    const auto p = make_params(1.0, 1.0, 0.8);
    const rql::ReturnLawEstimate plain = rql::estimate_return_law(p, 10000, 31);
    rql::EstimateOptions mom;
    mom.median_of_means_blocks = 10;
    const rql::ReturnLawEstimate sturdy = rql::estimate_return_law(p, 10000, 31, 0.99, mom);
    CHECK(sturdy.ci_half_width > 0.0);
    CHECK(std::abs(sturdy.mean - plain.mean) <
          3.0 * (plain.ci_half_width + sturdy.ci_half_width));
}

TEST_CASE("no-reneging estimate agrees with the stable-queue return mean") {
    // deadline = inf, lambda < mu: the return index is the classical number
    // of arrivals per emptying cycle, with mean mu/(mu - lambda) = 2 here.
    const auto p = make_params(1.0, 2.0, kInf);
    const rql::ReturnLawEstimate est = rql::estimate_return_law(p, 5000, 2029);
    CHECK(std::abs(est.mean - 2.0) < 2.0 * est.ci_half_width);
}

TEST_CASE("estimate_return_law rejects what it cannot honour") {
    CHECK_THROWS_AS(rql::estimate_return_law(make_params(1.0, 1.0, kInf), 100, 1),
                    rql::validation_error);
    CHECK_THROWS_AS(rql::estimate_return_law(make_params(2.0, 1.0, kInf), 100, 1),
                    rql::validation_error);
    CHECK_THROWS_AS(rql::estimate_return_law(make_params(1.0, 1.0, 1.0), 1, 1),
                    rql::validation_error);
    CHECK_THROWS_AS(rql::estimate_return_law(make_params(1.0, 1.0, 1.0), 100, 1, 1.0),
                    rql::validation_error);
    CHECK_THROWS_AS(rql::estimate_return_law(make_params(1.0, 1.0, 1.0), 100, 1, -0.1),
                    rql::validation_error);

    rql::EstimateOptions strangle;
    strangle.max_services_per_replication = 2;
    CHECK_THROWS_AS(
        rql::estimate_return_law(make_params(1.0, 1.0, 2.0), 50, 12, 0.99, strangle),
        rql::resource_error);
}

TEST_CASE("the walk reports undetermined when the ceiling cuts it off") {
    // arrivals every 0.1 forever, giant patience: the pool can never drain
    std::vector<double> gaps(64, 0.1);
    rql::Streams s = fixture(gaps, {1.0, 1.0, 1.0, 1.0});
    rql::RegenerationOptions opt;
    opt.max_services = 4;
    const rql::RegenerationResult res = rql::regeneration_by_index_sets(s, 100.0, opt);
    CHECK_FALSE(res.determined);
    CHECK(res.services_used == 4);
    CHECK(res.last_arrival >= 1);
}

TEST_CASE("longer patience can only postpone the regeneration") {
    // Same randomness, larger deadline: every waiter who survives the short
    // deadline survives the long one, so the empty step and the return index
    // are pathwise monotone.
    for (std::uint64_t i = 0; i < 200; ++i) {
        const std::uint64_t seed = rql::derive_stream(808, i);
        const auto p = make_params(1.0, 1.0, 1.0);
        rql::Streams s1 = rql::gen_streams(p, 1, 1, seed);
        rql::Streams s2 = rql::gen_streams(p, 1, 1, seed);
        const auto short_pat = rql::regeneration_by_index_sets(s1, 0.5);
        const auto long_pat = rql::regeneration_by_index_sets(s2, 1.0);
        REQUIRE(short_pat.determined);
        REQUIRE(long_pat.determined);
        CHECK(short_pat.empty_step <= long_pat.empty_step);
        CHECK(short_pat.return_index <= long_pat.return_index);
    }
}

TEST_CASE("an idle-and-quiet service window bounds the empty step from above") {
    // If service k lasts at least the deadline and no one arrives during it,
    // every earlier waiter has expired by its end; the index-set walk must
    // declare the pool empty no later than that k.
    for (std::uint64_t i = 0; i < 200; ++i) {
        const auto p = make_params(0.8, 1.1, 0.9);
        const std::uint64_t seed = rql::derive_stream(909, i);
        rql::Streams s = rql::gen_streams(p, 1, 1, seed);

        std::uint64_t quiet_window = 0;
        std::uint64_t next_arrival = 1;
        for (std::uint64_t k = 1; k <= 100000; ++k) {
            const double lo = k == 1 ? 0.0 : s.service_partial(k - 1);
            const double hi = s.service_partial(k);
            while (s.arrival_time(next_arrival) < lo) ++next_arrival;
            const bool blocked = s.arrival_time(next_arrival) <= hi;  // inclusive: safe side
            if (hi - lo >= p.deadline && !blocked) {
                quiet_window = k;
                break;
            }
        }
        REQUIRE(quiet_window > 0);

        rql::Streams s2 = rql::gen_streams(p, 1, 1, seed);
        const auto res = rql::regeneration_by_index_sets(s2, p.deadline);
        REQUIRE(res.determined);
        CHECK(res.empty_step <= quiet_window);
    }
}

TEST_CASE("busy period walk on pinned streams") {
    {
        rql::Streams s = fixture({0.5}, {0.4});
        const rql::BusyPeriodSample b = rql::busy_period_on(s);
        CHECK_FALSE(b.truncated);
        CHECK(b.duration == 0.4);
        CHECK(b.services == 1);
    }
    {
        rql::Streams s = fixture({0.5, 0.9}, {0.6, 0.2});
        const rql::BusyPeriodSample b = rql::busy_period_on(s);
        CHECK_FALSE(b.truncated);
        CHECK(b.duration == doctest::Approx(0.8).epsilon(1e-15));
        CHECK(b.services == 2);
    }
    {
        rql::Streams s = fixture({0.5, 0.5, 0.5}, {1.0, 1.0, 1.0});
        const rql::BusyPeriodSample b = rql::busy_period_on(s, 3);
        CHECK(b.truncated);
        CHECK(b.duration == kInf);
    }
}

TEST_CASE("overloaded busy periods die out about half the time") {
    // rho = 2: the busy period is finite with probability mu/lambda = 1/2.
    const auto p = make_params(2.0, 1.0, kInf);
    const std::uint64_t reps = 2000;
    std::uint64_t finite = 0;
    for (std::uint64_t i = 0; i < reps; ++i) {
        const rql::BusyPeriodSample b =
            rql::sample_busy_period(p, rql::derive_stream(5150, i), 5000);
        if (!b.truncated) ++finite;
    }
    const double freq = static_cast<double>(finite) / static_cast<double>(reps);
    const double se = std::sqrt(0.25 / static_cast<double>(reps));
    CHECK(std::abs(freq - 0.5) < 4.0 * se);
}
