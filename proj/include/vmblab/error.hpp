#pragma once

#include <stdexcept>
#include <string>

namespace vmblab {

// Exit-code classes used by the CLI.
enum class ErrorClass { config = 1, invariant = 2, numerical = 3 };

class Error : public std::runtime_error {
public:
    Error(std::string kind, ErrorClass cls, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)), cls_(cls) {}
    const std::string& kind() const noexcept { return kind_; }
    ErrorClass error_class() const noexcept { return cls_; }
    int exit_code() const noexcept { return static_cast<int>(cls_); }

private:
    std::string kind_;
    ErrorClass cls_;
};

#define VMBLAB_ERROR(Name, Class)                                                  \
    struct Name : Error {                                                          \
        explicit Name(const std::string& what) : Error(#Name, ErrorClass::Class, what) {} \
    };

VMBLAB_ERROR(ConfigInvalid, config)
VMBLAB_ERROR(UnknownInitializer, config)
VMBLAB_ERROR(IoError, config)

VMBLAB_ERROR(GridMismatch, invariant)
VMBLAB_ERROR(NonZeroMean, invariant)
VMBLAB_ERROR(NotMicroscopic, invariant)
VMBLAB_ERROR(IncompatibleSources, invariant)
VMBLAB_ERROR(OrderMismatch, invariant)
VMBLAB_ERROR(OrderTooHigh, invariant)
VMBLAB_ERROR(InsufficientHistory, invariant)
VMBLAB_ERROR(TooFewSamples, invariant)
VMBLAB_ERROR(InvariantViolation, invariant)

VMBLAB_ERROR(CflViolation, numerical)
VMBLAB_ERROR(NonFiniteState, numerical)
VMBLAB_ERROR(EpsilonTooSmall, numerical)
VMBLAB_ERROR(EpsilonUnderflow, numerical)
VMBLAB_ERROR(NonPositiveValues, numerical)

#undef VMBLAB_ERROR

}  // namespace vmblab
