#pragma once

#include <stdexcept>
#include <string>

namespace softpneu {

// Failure taxonomy shared by the whole library. The CLI maps kinds onto
// process exit codes; tests match on the kind rather than the message.
enum class ErrorKind {
    InvalidArgument,    // caller violated a documented precondition
    InvalidModel,       // degenerate transfer function or state space
    UnsupportedModel,   // structurally valid but outside an operation's domain
    PoleOnGrid,         // frequency grid touches a pole
    NormUnbounded,      // H-infinity norm requested for an unstable system
    ActuationLimit,     // commanded motor speed exceeds the pump limit
    InvalidTrace,       // malformed experiment trace (grid, lengths, values)
    InvalidExperiment,  // trace contents do not match the claimed protocol
    UndefinedFit,       // fit metric has no meaning for this data
    OrderTooHigh,       // requested model order exceeds the data rank
    DegenerateDivision, // nominal response vanishes on the comparison grid
    SynthesisInfeasible,// Riccati synthesis failed (non-stabilizable, ...)
    BoundaryCase,       // eigenvalues on the stability boundary
    NominalInstability, // nominal closed loop unstable before a robust check
    StepSize,           // integration step too large for the model
    NumericFailure,     // internal numerical breakdown
    Validation,         // config or input file failed schema validation
    Parse,              // unreadable input file
    Dependency,         // missing upstream artifact
};

class Error : public std::runtime_error {
 public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

 private:
    ErrorKind kind_;
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::InvalidArgument:     return "invalid-argument";
        case ErrorKind::InvalidModel:        return "invalid-model";
        case ErrorKind::UnsupportedModel:    return "unsupported-model";
        case ErrorKind::PoleOnGrid:          return "pole-on-grid";
        case ErrorKind::NormUnbounded:       return "norm-unbounded";
        case ErrorKind::ActuationLimit:      return "actuation-limit";
        case ErrorKind::InvalidTrace:        return "invalid-trace";
        case ErrorKind::InvalidExperiment:   return "invalid-experiment";
        case ErrorKind::UndefinedFit:        return "undefined-fit";
        case ErrorKind::OrderTooHigh:        return "order-too-high";
        case ErrorKind::DegenerateDivision:  return "degenerate-division";
        case ErrorKind::SynthesisInfeasible: return "synthesis-infeasible";
        case ErrorKind::BoundaryCase:        return "boundary-case";
        case ErrorKind::NominalInstability:  return "nominal-instability";
        case ErrorKind::StepSize:            return "step-size";
        case ErrorKind::NumericFailure:      return "numeric-failure";
        case ErrorKind::Validation:          return "validation";
        case ErrorKind::Parse:               return "parse";
        case ErrorKind::Dependency:          return "dependency";
    }
    return "unknown";
}

}  // namespace softpneu
