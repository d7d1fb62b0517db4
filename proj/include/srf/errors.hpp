#pragma once

#include <stdexcept>
#include <string>

namespace srf {

/// Base class for all numerical failures raised by the library.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// The metric component lost positivity (left the Kahler cone).
class PositivityLost : public NumericalError {
public:
    int node;
    double value;
    PositivityLost(int node_, double value_)
        : NumericalError("positivity lost at node " + std::to_string(node_) +
                         " (value " + std::to_string(value_) + ")"),
          node(node_), value(value_) {}
};

/// A time step was rejected by the embedded error estimate.
class StepRejected : public NumericalError {
public:
    double dt;
    explicit StepRejected(double dt_)
        : NumericalError("step rejected at dt = " + std::to_string(dt_)), dt(dt_) {}
};

class NonPositiveTau : public NumericalError {
public:
    explicit NonPositiveTau(double tau)
        : NumericalError("tau must stay positive, got " + std::to_string(tau)) {}
};

/// Requested time needs data beyond the stored trajectory.
class RangeExceeded : public NumericalError {
public:
    explicit RangeExceeded(const std::string& msg) : NumericalError(msg) {}
};

/// A transported node map stopped being strictly monotone.
class MonotonicityLost : public NumericalError {
public:
    explicit MonotonicityLost(const std::string& msg) : NumericalError(msg) {}
};

class NotFound : public NumericalError {
public:
    explicit NotFound(const std::string& msg) : NumericalError(msg) {}
};

class DegenerateAnnulus : public NumericalError {
public:
    explicit DegenerateAnnulus(const std::string& msg) : NumericalError(msg) {}
};

class FitUnstable : public NumericalError {
public:
    explicit FitUnstable(const std::string& msg) : NumericalError(msg) {}
};

class Unsupported : public NumericalError {
public:
    explicit Unsupported(const std::string& msg) : NumericalError(msg) {}
};

class SolverFailure : public NumericalError {
public:
    explicit SolverFailure(const std::string& msg) : NumericalError(msg) {}
};

/// Configuration parse/validation problem (maps to CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace srf
