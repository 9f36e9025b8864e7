#pragma once

#include <stdexcept>

namespace rql {

// Bad inputs: parameters out of range, malformed configs, broken preconditions.
struct validation_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A run hit a configured resource ceiling (event budget, replication ceiling,
// series truncation budget) before it could produce a trustworthy answer.
struct resource_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rql
