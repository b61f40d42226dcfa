#pragma once

#include <stdexcept>
#include <string>

namespace kirchlog {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A model, grid or algorithm parameter is outside its admissible range.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Sizes of fields and grids disagree.
class StructuralError : public Error {
public:
    using Error::Error;
};

/// An operation was called outside its mathematical domain
/// (zero-gradient field for the fibering map, E outside (0, d), ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Root bracketing failed inside the admissible scale range.
class NumericalRangeError : public Error {
public:
    using Error::Error;
};

/// A constant estimate did not converge; the best value found is attached.
class EstimationError : public Error {
public:
    EstimationError(const std::string& what, double best)
        : Error(what), best_so_far(best) {}
    double best_so_far;
};

/// Every start of a multi-start minimisation failed.
class OptimizationError : public Error {
public:
    using Error::Error;
};

}  // namespace kirchlog
