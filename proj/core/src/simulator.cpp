#include "rql/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "rql/errors.hpp"

namespace rql {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Waiter {
    std::uint64_t index;
    double arrival;
    double expiry;  // arrival + deadline; nondecreasing along the queue
};

// Tie-break order for events at the same instant: a completion is processed
// before an abandonment, and both before an arrival. This matches the strict
// inequalities of the index-set walk (an arrival exactly at a completion
// instant meets a freed server; a waiter whose patience ends exactly then is
// not selected).
enum class EventKind { completion, abandonment, arrival, none };

class Engine {
  public:
    Engine(const Parameters& params, Streams& streams, const SimulateOptions& options,
           std::uint64_t n_tracked, SamplePath* path)
        : params_(params),
          streams_(streams),
          n_tracked_(n_tracked),
          path_(path),
          record_trace_(options.record_trace),
          eager_(options.record_trace || options.eager_abandonment) {
        max_events_ = options.max_events
                          ? options.max_events
                          : 64 * std::max<std::uint64_t>(n_tracked, 1) + (1ull << 22);
        transient_ = !params.finite_deadline() && params.lambda > params.mu;
        unresolved_ = n_tracked;
        if (path_) {
            path_->outcomes.resize(n_tracked);
            for (std::uint64_t i = 0; i < n_tracked; ++i) path_->outcomes[i].index = i;
        }
    }

    void run_tracked() {
        while (unresolved_ > 0) {
            const EventKind kind = dispatch_next();
            if (kind == EventKind::none) break;  // transient runs only
            if (events_ > max_events_) {
                truncate_by_ceiling();
                return;
            }
            // A transient run stops right after its last tracked arrival:
            // serving the stack down to empty afterwards would hand everyone
            // a service the unbounded process never gives them.
            if (transient_ && next_arrival_ >= n_tracked_) break;
        }
        if (unresolved_ > 0) mark_transient_leftovers();
        finish_path();
    }

    std::uint64_t run_until_zero_wait(std::uint64_t max_events) {
        zero_wait_hunt_ = true;
        max_events_ = max_events;
        while (found_zero_wait_ == 0) {
            const EventKind kind = dispatch_next();
            if (kind == EventKind::none || events_ > max_events_)
                throw resource_error(
                    "event ceiling exceeded before any customer arrived to an empty "
                    "system; raise max_events");
        }
        return found_zero_wait_;
    }

  private:
    bool tracked(std::uint64_t index) const { return path_ && index < n_tracked_; }

    bool arrivals_pending() const {
        if (zero_wait_hunt_) return true;
        if (next_arrival_ < n_tracked_) return true;
        return !transient_ && unresolved_ > 0;
    }

    void trace(double t) {
        if (record_trace_)
            path_->queue_length_trace.emplace_back(t, waiting_.size() + (busy_ ? 1 : 0));
    }

    EventKind dispatch_next() {
        const double t_completion = busy_ ? service_end_ : kInf;
        const double t_abandon = (eager_ && !waiting_.empty()) ? waiting_.front().expiry : kInf;
        const double t_arrival =
            arrivals_pending() ? streams_.arrival_time(next_arrival_) : kInf;

        EventKind kind = EventKind::none;
        double t = kInf;
        if (t_completion < kInf) {
            t = t_completion;
            kind = EventKind::completion;
        }
        if (t_abandon < t) {
            t = t_abandon;
            kind = EventKind::abandonment;
        }
        if (t_arrival < t) {
            t = t_arrival;
            kind = EventKind::arrival;
        }
        if (kind == EventKind::none) return kind;

        ++events_;
        now_ = t;
        switch (kind) {
            case EventKind::completion: handle_completion(); break;
            case EventKind::abandonment: flush_expired(); break;
            case EventKind::arrival: handle_arrival(); break;
            default: break;
        }
        return kind;
    }

    void handle_arrival() {
        const std::uint64_t n = next_arrival_++;
        if (!busy_) {
            // Server idle; in lazy mode any leftover waiters were flushed at
            // the completion that idled it, so the system really is empty.
            start_service(n, now_);
            if (zero_wait_hunt_ && n >= 1 && found_zero_wait_ == 0) found_zero_wait_ = n;
        } else {
            waiting_.push_back({n, now_, now_ + params_.deadline});
        }
        trace(now_);
    }

    void handle_completion() {
        busy_ = false;
        service_end_ = kInf;
        trace(now_);
        flush_expired();
        if (!waiting_.empty()) {
            const Waiter w = waiting_.back();  // most recent eligible arrival
            waiting_.pop_back();
            start_service(w.index, w.arrival);
        }
    }

    // Drops every waiter whose patience has run out by now_. Expiries are
    // nondecreasing front to back, so this is a prefix. In lazy mode this is
    // where abandonments get recorded (the expiry instant passed, the
    // decision was already forced); with eager abandonment the flush happens
    // at the expiry instant itself, so now_ is always the right timestamp.
    void flush_expired() {
        while (!waiting_.empty() && waiting_.front().expiry <= now_) {
            const Waiter w = waiting_.front();
            waiting_.pop_front();
            if (tracked(w.index)) {
                auto& o = path_->outcomes[w.index];
                o.arrival_time = w.arrival;
                o.wait = kInf;
                --unresolved_;
            }
            trace(now_);
        }
    }

    void start_service(std::uint64_t index, double arrival) {
        busy_ = true;
        ++services_started_;
        service_end_ = now_ + streams_.service_duration(services_started_);
        const std::uint64_t rank = served_count_++;
        if (tracked(index)) {
            auto& o = path_->outcomes[index];
            o.arrival_time = arrival;
            o.wait = now_ - arrival;  // exactly service_start - arrival_time
            o.service_start = now_;
            o.served_rank = rank;
            --unresolved_;
        }
    }

    void truncate_by_ceiling() {
        // Keep the longest all-resolved prefix of outcomes; everything after
        // it is unknown, not abandoned, so it must not masquerade as data.
        std::uint64_t resolved_prefix = 0;
        while (resolved_prefix < n_tracked_) {
            const auto& o = path_->outcomes[resolved_prefix];
            if (!o.served() && !std::isinf(o.wait)) break;
            ++resolved_prefix;
        }
        path_->outcomes.resize(resolved_prefix);
        path_->hit_event_ceiling = true;
        path_->warning = "event ceiling (" + std::to_string(max_events_) +
                         ") exceeded; outcomes truncated to the first " +
                         std::to_string(resolved_prefix) + " customers";
        finish_path();
    }

    void mark_transient_leftovers() {
        for (auto& o : path_->outcomes) {
            if (o.served() || std::isinf(o.wait)) continue;
            o.arrival_time = streams_.arrival_time(o.index);
            o.wait = kInf;
        }
        path_->warning =
            "transient regime (deadline = inf, lambda > mu): run stopped at the last "
            "arrival; customers still waiting are recorded as never served";
    }

    void finish_path() {
        if (!path_) return;
        std::vector<std::pair<std::uint64_t, double>> by_rank;
        by_rank.reserve(path_->outcomes.size());
        for (const auto& o : path_->outcomes)
            if (o.served()) by_rank.emplace_back(*o.served_rank, o.wait);
        std::sort(by_rank.begin(), by_rank.end());
        path_->served_waits.clear();
        path_->served_waits.reserve(by_rank.size());
        for (const auto& [rank, wait] : by_rank) path_->served_waits.push_back(wait);
    }

    const Parameters& params_;
    Streams& streams_;
    std::uint64_t n_tracked_;
    SamplePath* path_;
    bool record_trace_;
    bool eager_;
    bool transient_ = false;
    bool zero_wait_hunt_ = false;

    double now_ = 0.0;
    bool busy_ = false;
    double service_end_ = kInf;
    std::deque<Waiter> waiting_;
    std::uint64_t next_arrival_ = 0;
    std::uint64_t services_started_ = 0;
    std::uint64_t served_count_ = 0;
    std::uint64_t unresolved_ = 0;
    std::uint64_t events_ = 0;
    std::uint64_t max_events_ = 0;
    std::uint64_t found_zero_wait_ = 0;
};

}  // namespace

SamplePath simulate_on(const Parameters& params, Streams& streams, std::uint64_t n_customers,
                       const SimulateOptions& options) {
    validate(params);
    if (n_customers < 1) throw validation_error("n_customers must be at least 1");
    if (streams.lambda != params.lambda || streams.mu != params.mu)
        throw validation_error("streams were generated for different rates");
    SamplePath path;
    path.params = params;
    Engine engine(params, streams, options, n_customers, &path);
    engine.run_tracked();
    return path;
}

SamplePath simulate(const Parameters& params, std::uint64_t n_customers, std::uint64_t seed,
                    const SimulateOptions& options) {
    validate(params);
    if (n_customers < 1) throw validation_error("n_customers must be at least 1");
    Streams streams = gen_streams(params, 1, 1, seed);
    return simulate_on(params, streams, n_customers, options);
}

std::uint64_t first_zero_wait_index(const Parameters& params, Streams& streams,
                                    std::uint64_t max_events) {
    validate(params);
    Engine engine(params, streams, SimulateOptions{}, 0, nullptr);
    return engine.run_until_zero_wait(max_events);
}

}  // namespace rql
