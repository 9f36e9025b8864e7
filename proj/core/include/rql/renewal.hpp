#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace rql {

// q[i] is the probability that a cycle takes i+1 steps (a law on {1,2,...}
// with finite support). Must sum to 1.
struct RenewalState {
    std::vector<double> p00;  // p00[n] = P(the walk is at a renewal at step n)
};

// Discrete renewal recursion p00[n] = sum_{k=1..n} q[k-1] * p00[n-k] with
// p00[0] = 1. When q is aperiodic the sequence tends to 1/(mean cycle).
RenewalState renewal_iterate(const std::vector<double>& q, std::size_t n);

// The spine chain that realizes q as its first-return law: from state i the
// walk either drops to 0 (ending a cycle of length i+1) or advances to i+1.
class ChainSpec {
  public:
    // q[i] = mass of cycle length i+1; trailing zeros are trimmed. Throws
    // validation_error if q is empty, has negative entries, or does not sum
    // to 1.
    explicit ChainSpec(std::vector<double> q);

    const std::vector<double>& return_law() const noexcept { return q_; }
    std::size_t states() const noexcept { return q_.size(); }

    // One-step transition probability. Rows sum to 1 exactly: the advance
    // probability is computed as 1 - (drop probability).
    double transition(std::size_t i, std::size_t j) const;

  private:
    std::vector<double> q_;
    std::vector<double> suffix_;  // suffix_[i] = q_[i] + q_[i+1] + ...
};

// P(first return to state 0 happens exactly at step k), by stepping the
// distribution with state 0 taboo. Equals the chain's return law by
// construction; k beyond the support gives 0.
double chain_first_return(const ChainSpec& spec, std::uint64_t k);

}  // namespace rql
