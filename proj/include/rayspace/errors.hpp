#pragma once

#include <stdexcept>
#include <string>

namespace rayspace {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EllipticInput : Error { using Error::Error; };
struct IdentityInput : Error { using Error::Error; };
struct NotHyperbolic : Error { using Error::Error; };
struct UnresolvedPrecision : Error { using Error::Error; };
struct NotRational : Error { using Error::Error; };
struct NotInDelta : Error { using Error::Error; };
struct WitnessSearchExhausted : Error { using Error::Error; };
struct DepthExceeded : Error { using Error::Error; };
struct SamePoint : Error { using Error::Error; };
struct StepBudgetExceeded : Error { using Error::Error; };
struct TooFewSteps : Error { using Error::Error; };
struct NotAnAutomorphism : Error { using Error::Error; };
struct PeripheralNotPreserved : Error { using Error::Error; };
struct InsufficientDepth : Error { using Error::Error; };
struct NotFillingWithinDepth : Error { using Error::Error; };
struct DisjointnessFailure : Error { using Error::Error; };
struct InconsistentRotation : Error { using Error::Error; };
struct IoFailure : Error { using Error::Error; };

struct ConfigParseError : Error {
    int line;
    ConfigParseError(int line_, const std::string& what_)
        : Error("config line " + std::to_string(line_) + ": " + what_), line(line_) {}
};

/// Internal invariant violations (never expected on valid inputs).
struct InvariantViolation : Error { using Error::Error; };

inline void check(bool cond, const char* msg) {
    if (!cond) throw InvariantViolation(msg);
}

}  // namespace rayspace
