#pragma once

#include <stdexcept>
#include <string>

namespace wdg {

/// Invalid user input: mesh sizes, unsupported degrees, unknown config keys.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A physical assumption of the model was violated during a run
/// (non-degeneracy of the Westervelt coefficient, positivity of D(p)).
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Linear solver breakdown, non-convergence, or a violated residual contract.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

/// Should not happen for valid inputs.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace wdg
