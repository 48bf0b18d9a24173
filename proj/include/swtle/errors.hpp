#pragma once

#include <stdexcept>
#include <string>

namespace swtle {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or precondition violation (non-positive bandwidth, empty
/// sample, malformed grid, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// The local denominator of an adjustment factor fell below the guard floor:
/// the source curve is (numerically) orthogonal to the target at this point.
class OrthogonalAtXError : public Error {
public:
    explicit OrthogonalAtXError(double x)
        : Error("adjustment denominator below guard floor at x = " + std::to_string(x) +
                ": source curve is locally orthogonal to the target there; "
                "set a nonzero GuardPolicy::shift_a to shift the source responses away from zero"),
          x_(x) {}

    double x() const { return x_; }

private:
    double x_;
};

/// The local Gram matrix of the basis-function adjustment is numerically
/// singular at this point.
class DegenerateBasisError : public Error {
public:
    DegenerateBasisError(double x, int k)
        : Error("degenerate basis at x = " + std::to_string(x) + " with k = " + std::to_string(k) +
                ": local Gram matrix condition number above 1e12; try a smaller k"),
          x_(x), k_(k) {}

    double x() const { return x_; }
    int k() const { return k_; }

private:
    double x_;
    int k_;
};

/// Bandwidth selection could not rank any grid cell (every leave-one-out fold
/// of every cell was penalized by the orthogonality guard).
class SelectionError : public Error {
public:
    using Error::Error;
};

/// A nonlinear least-squares fit did not converge and the caller required one.
class NonConvergenceError : public Error {
public:
    using Error::Error;
};

/// A Monte Carlo run exceeded its replication-failure budget.
class SimulationError : public Error {
public:
    using Error::Error;
};

/// Malformed input file (CSV parse failure, missing column, non-finite cell).
class DataError : public Error {
public:
    using Error::Error;
};

} // namespace swtle
