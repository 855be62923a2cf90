#pragma once

#include <stdexcept>
#include <string>

namespace sqsl {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)), message_(what) {}

    /// Short machine-readable tag, e.g. "NotHermitian".
    const std::string& kind() const noexcept { return kind_; }
    /// what() without the kind prefix.
    const std::string& message() const noexcept { return message_; }

private:
    std::string kind_;
    std::string message_;
};

/// Bad input: parameters out of range, malformed config, wrong dimensions.
/// The CLI maps these to exit code 1.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// The numerics failed on valid input. The CLI maps these to exit code 2.
class NumericalError : public Error {
public:
    using Error::Error;
};

#define SQSL_DEFINE_ERROR(Name, Base)                                   \
    class Name : public Base {                                          \
    public:                                                             \
        explicit Name(const std::string& what) : Base(#Name, what) {}   \
    }

SQSL_DEFINE_ERROR(DimensionMismatch, ValidationError);
SQSL_DEFINE_ERROR(NotHermitian, ValidationError);
SQSL_DEFINE_ERROR(SqueezeUnstable, ValidationError);
SQSL_DEFINE_ERROR(WrongInitialState, ValidationError);
SQSL_DEFINE_ERROR(StepTooLarge, ValidationError);
SQSL_DEFINE_ERROR(EmptyTrajectory, ValidationError);
SQSL_DEFINE_ERROR(NotPure, ValidationError);
SQSL_DEFINE_ERROR(InvalidParameter, ValidationError);
SQSL_DEFINE_ERROR(ConfigError, ValidationError);

SQSL_DEFINE_ERROR(NoConvergence, NumericalError);
SQSL_DEFINE_ERROR(CutoffNotConverged, NumericalError);
SQSL_DEFINE_ERROR(PositivityViolated, NumericalError);
SQSL_DEFINE_ERROR(FidelityOutOfRange, NumericalError);
SQSL_DEFINE_ERROR(NonFiniteValue, NumericalError);

#undef SQSL_DEFINE_ERROR

}  // namespace sqsl
