#pragma once

#include <stdexcept>
#include <string>

namespace pcnls {

/// Invalid user-supplied parameters (grid shape, model exponents, constraints).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Operation undefined for the given input, e.g. a zero field where the
/// functional needs u != 0.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Non-finite intermediate value (overflow in an energy part, NaN in a field).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative method hit its cap before meeting its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A group element does not map the grid's node set onto itself.
class ExactnessError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or truncated binary field file.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Output location missing or not writable.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Something the algorithms guarantee did not hold.
class InternalConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace pcnls
