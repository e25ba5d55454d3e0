#pragma once

#include <stdexcept>
#include <string>

namespace fluxfocus {

// invalid user-supplied parameters (geometry, film, grid, config files)
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// evaluation at a point where a closed form is singular
struct SingularityError : std::domain_error {
    using std::domain_error::domain_error;
};

// argument outside the validity range of an asymptotic or piecewise formula
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct SolverError : std::runtime_error {
    SolverError(const std::string& what, double rcond)
        : std::runtime_error(what), reciprocal_condition(rcond) {}
    double reciprocal_condition;
};

}  // namespace fluxfocus
