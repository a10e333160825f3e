#pragma once

#include <stdexcept>
#include <string>

namespace hamflow {

// Base class for every library error. CLI maps these to exit code 1
// (contract/certificate failures) or 2 (usage/config), see tools/main.cpp.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- core ---
struct EvaluationError : Error {
    using Error::Error;
};
struct RegularityError : Error {
    double grad_norm;
    explicit RegularityError(const std::string& msg, double gnorm)
        : Error(msg), grad_norm(gnorm) {}
};
struct EmptyLevelSetError : Error {
    using Error::Error;
};

// --- flow ---
struct StepError : Error {
    using Error::Error;
};
struct EscapeError : Error {
    double exit_time;
    explicit EscapeError(const std::string& msg, double t)
        : Error(msg), exit_time(t) {}
};
struct UnsupportedError : Error {
    using Error::Error;
};

// --- poincare ---
struct FrameMismatchError : Error {
    using Error::Error;
};

// --- lyapunov ---
struct TrivialSplittingError : Error {
    double exponent;
    explicit TrivialSplittingError(const std::string& msg, double lam)
        : Error(msg), exponent(lam) {}
};

// --- perturb ---
struct ParameterError : Error {
    using Error::Error;
};
struct ValidityError : Error {
    using Error::Error;
};
struct CertificateError : Error {
    std::string violated_bound;
    CertificateError(const std::string& msg, std::string bound)
        : Error(msg), violated_bound(std::move(bound)) {}
};

// --- flowbox ---
struct TransversalityError : Error {
    using Error::Error;
};
struct ChartError : Error {
    using Error::Error;
};
struct FlowboxOverlapError : Error {
    using Error::Error;
};
struct ScheduleError : Error {
    using Error::Error;
};
struct NoExchangeError : Error {
    double achieved_angle;
    explicit NoExchangeError(const std::string& msg, double angle)
        : Error(msg), achieved_angle(angle) {}
};

// --- cli/config ---
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace hamflow
