#pragma once

#include <stdexcept>
#include <string>

namespace eqflow {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A Parameters invariant does not hold.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A coordinate or shape lies outside the region where a model is defined.
class DomainError : public Error {
public:
    using Error::Error;
};

class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double estimate)
        : Error(what), error_estimate(estimate) {}
    double error_estimate;
};

class IntegratorError : public Error {
public:
    using Error::Error;
};

/// A documented precondition of an operation is violated.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// The linearized surface operator cannot be integrated in double precision.
class StiffnessError : public Error {
public:
    StiffnessError(const std::string& what, double kappa)
        : Error(what), stiffness(kappa) {}
    double stiffness;
};

/// Two independent computation routes disagree beyond tolerance.
class ConsistencyError : public Error {
public:
    ConsistencyError(const std::string& what, double gap)
        : Error(what), discrepancy(gap) {}
    double discrepancy;
};

}  // namespace eqflow
