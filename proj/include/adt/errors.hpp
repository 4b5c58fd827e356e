#pragma once

#include <stdexcept>
#include <string>

namespace adt {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid inputs: points outside a region, dimension mismatches, bad files.
class DomainError : public Error {
public:
    using Error::Error;
};

// Rank-deficient or numerically singular matrices (rcond below threshold).
class SingularError : public Error {
public:
    using Error::Error;
};

// Degenerate variance structures or degenerate failure-time quantiles.
class DegenerateError : public Error {
public:
    using Error::Error;
};

// Iterative solvers that exhaust their budget without meeting tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace adt
