#pragma once

// Oracle for the fraction of customers who find the system empty when there
// is no abandonment: the queue length seen by successive arrivals is a Markov
// chain whose stationary mass at 0 can be computed by linear algebra, with no
// reference to the simulator. Between two arrivals each of the i+1 customers
// present finishes before the next arrival independently with probability
// p = mu / (lambda + mu) per service-vs-arrival race.

#include <cmath>
#include <cstddef>
#include <vector>

#include "linalg.hpp"

namespace testsupport {

// Row-stochastic transition matrix of the arrival-seen queue length, states
// 0..k_max with the overflow mass reflected into the top state. For
// lambda < mu the truncation error decays geometrically in k_max.
inline std::vector<std::vector<double>> arrival_seen_chain(double lambda, double mu,
                                                           std::size_t k_max) {
    const double p = mu / (lambda + mu);
    std::vector<std::vector<double>> mat(k_max + 1, std::vector<double>(k_max + 1, 0.0));
    for (std::size_t i = 0; i <= k_max; ++i) {
        // i seen at this arrival -> i+1 present; seeing j next means i+1-j
        // services each won their race against the next arrival.
        double acc = 0.0;
        for (std::size_t j = 1; j <= i + 1 && j <= k_max; ++j) {
            const double mass = std::pow(p, static_cast<double>(i + 1 - j)) * (1.0 - p);
            mat[i][j] = mass;
            acc += mass;
        }
        mat[i][0] = std::pow(p, static_cast<double>(i + 1));
        acc += mat[i][0];
        // Mass the truncation chopped off is reflected into the top state.
        mat[i][k_max] += 1.0 - acc;
    }
    return mat;
}

// Stationary probability that an arrival finds the system empty.
inline double empty_seen_probability(double lambda, double mu, std::size_t k_max = 120) {
    const auto pi = stationary_distribution(arrival_seen_chain(lambda, mu, k_max));
    return pi[0];
}

}  // namespace testsupport
