#include "rql/renewal.hpp"

#include <cmath>
#include <numeric>

#include "rql/errors.hpp"

namespace rql {
namespace {

void check_law(const std::vector<double>& q) {
    if (q.empty()) throw validation_error("cycle law must not be empty");
    double sum = 0.0;
    for (const double v : q) {
        if (!(v >= 0.0) || v > 1.0)
            throw validation_error("cycle law entries must lie in [0, 1]");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw validation_error("cycle law must sum to 1");
}

}  // namespace

RenewalState renewal_iterate(const std::vector<double>& q, std::size_t n) {
    check_law(q);
    RenewalState state;
    state.p00.assign(n + 1, 0.0);
    state.p00[0] = 1.0;
    for (std::size_t step = 1; step <= n; ++step) {
        double acc = 0.0;
        const std::size_t kmax = std::min(step, q.size());
        for (std::size_t k = 1; k <= kmax; ++k) acc += q[k - 1] * state.p00[step - k];
        state.p00[step] = acc;
    }
    return state;
}

ChainSpec::ChainSpec(std::vector<double> q) : q_(std::move(q)) {
    while (!q_.empty() && q_.back() == 0.0) q_.pop_back();
    check_law(q_);
    // Suffix sums from the right: suffix_[i] = P(cycle length > i), exact at
    // the last state (suffix_[K-1] == q_[K-1], so the drop there is exactly 1).
    suffix_.assign(q_.size(), 0.0);
    double acc = 0.0;
    for (std::size_t i = q_.size(); i-- > 0;) {
        acc += q_[i];
        suffix_[i] = acc;
    }
}

double ChainSpec::transition(std::size_t i, std::size_t j) const {
    if (i >= states() || j >= states())
        throw validation_error("transition: state out of range");
    const double drop = suffix_[i] > 0.0 ? q_[i] / suffix_[i] : 1.0;
    if (j == 0) return drop;
    if (j == i + 1) return 1.0 - drop;
    return 0.0;
}

double chain_first_return(const ChainSpec& spec, std::uint64_t k) {
    if (k == 0) throw validation_error("first-return step must be at least 1");
    const std::size_t states = spec.states();
    // Step the distribution with state 0 taboo; the mass that would land on 0
    // at step k is exactly the first-return probability.
    std::vector<double> u(states, 0.0), next(states, 0.0);
    u[0] = 1.0;
    for (std::uint64_t step = 1;; ++step) {
        double into_zero = 0.0;
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t i = 0; i < states; ++i) {
            if (u[i] == 0.0) continue;
            into_zero += u[i] * spec.transition(i, 0);
            for (std::size_t j = 1; j < states; ++j) {
                const double p = spec.transition(i, j);
                if (p > 0.0) next[j] += u[i] * p;
            }
        }
        if (step == k) return into_zero;
        u.swap(next);
        // All mass may die out before step k (finite support): then 0.
        if (std::accumulate(u.begin(), u.end(), 0.0) == 0.0) return 0.0;
    }
}

}  // namespace rql
