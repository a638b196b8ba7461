#pragma once

#include <stdexcept>
#include <string>

namespace cavsim {

// Numeric failure carrying the quantity that tripped the check, so callers can
// report *how far* out of spec an input or iteration was.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double defect)
        : std::runtime_error(what), defect_(defect) {}
    double defect() const noexcept { return defect_; }

private:
    double defect_ = 0.0;
};

// Input transform violates the Bogoliubov identities beyond its tolerance budget.
class BogoliubovDefectError : public NumericError {
    using NumericError::NumericError;
};

// Adaptive quadrature failed to reach the requested absolute tolerance.
class QuadratureError : public NumericError {
    using NumericError::NumericError;
};

// Root bracketing / polishing failed (carries the residual).
class SolverError : public NumericError {
    using NumericError::NumericError;
};

// Step-size refinement loop exhausted without meeting its convergence target.
class RefinementError : public NumericError {
    using NumericError::NumericError;
};

// Nonlinear fit left the admissible flux domain or failed to converge.
class FitError : public NumericError {
    using NumericError::NumericError;
};

// Bad scenario/config input (unknown key, malformed value, unsupported combination).
class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace cavsim
