#pragma once

#include <stdexcept>
#include <string>

namespace qflow {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shape or ring mismatch between operands.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A leading coefficient that has no inverse in the coefficient ring.
class NotAUnit : public Error {
public:
    NotAUnit() : Error("not a unit") {}
    explicit NotAUnit(const std::string& what) : Error("not a unit: " + what) {}
};

/// Argument outside the documented domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Formal Newton iteration whose residual valuation stopped increasing.
class SolverStalled : public Error {
public:
    SolverStalled() : Error("implicit step stalled") {}
    explicit SolverStalled(const std::string& detail) : Error("implicit step stalled: " + detail) {}
};

/// Exact division that left a remainder.
class InexactDivision : public Error {
public:
    using Error::Error;
};

}  // namespace qflow
