#pragma once

#include <stdexcept>
#include <string>

namespace qcd {

// Input or configuration that violates a documented precondition.
// The CLI maps this to exit status 1.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Failure while evaluating a statistic or bound (non-finite data,
// exceeded capacity). The CLI maps this to exit status 2.
class NumericError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace qcd
