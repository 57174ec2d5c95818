#pragma once

#include <stdexcept>
#include <string>

namespace lmoapprox {

/// Raised when an argument lies outside the domain of an operation
/// (unknown label, dimension mismatch, out-of-range cardinality).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised when input data violates a model invariant (unnormalized
/// weights, non-PD covariance, missing conditional).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a computation is refused because the requested exact path
/// is not available (e.g. grid quadrature above three dimensions).
class NumericalRefusal : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace lmoapprox
