#ifndef DAEKIT_TYPES_HPP
#define DAEKIT_TYPES_HPP

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>

namespace daekit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ShapeMismatch : public Error {
public:
    using Error::Error;
};

class NonFinite : public Error {
public:
    using Error::Error;
};

class IndexTooHigh : public Error {
public:
    using Error::Error;
};

class NumericalRankAmbiguous : public Error {
public:
    using Error::Error;
};

class SingularPencilInput : public Error {
public:
    using Error::Error;
};

// Carries the last Newton iterate for diagnostics.
class SingularPhi : public Error {
public:
    SingularPhi(const std::string& msg, Vector last) : Error(msg), last_iterate(std::move(last)) {}
    Vector last_iterate;
};

class NoConvergence : public Error {
public:
    NoConvergence(const std::string& msg, Vector last) : Error(msg), last_iterate(std::move(last)) {}
    Vector last_iterate;
};

class InconsistentOverdetermined : public Error {
public:
    InconsistentOverdetermined(const std::string& msg, Vector point, double residual)
        : Error(msg), point(std::move(point)), r_ov(residual) {}
    Vector point;
    double r_ov = 0.0;
};

class InconsistentStart : public Error {
public:
    using Error::Error;
};

class SamplerEmpty : public Error {
public:
    using Error::Error;
};

class DisconnectedGraph : public Error {
public:
    using Error::Error;
};

class MissingBoundaryData : public Error {
public:
    using Error::Error;
};

class StateEquationDomain : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace daekit

#endif
