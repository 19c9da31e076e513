#pragma once

#include <stdexcept>
#include <string>

namespace thinfilm {

/// Invalid physical or numerical parameters supplied by the caller.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A formula evaluated outside the set where it is defined (e.g. H(0) for q <= -1).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Quadrature, root finding, ODE integration or a cross-check identity failed.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace thinfilm
