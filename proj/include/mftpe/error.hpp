#pragma once

#include <stdexcept>
#include <string>

namespace mftpe {

enum class Errc {
    NonDivisibleBlockSize,
    BlockTooSmall,
    EmptyImage,
    InvalidImage,
    UnsupportedFormat,
    ArityMismatch,
    MissingBlockContext,
    InvalidParams,
    MalformedEnvelope,
    ParamMismatch,
    ProbabilityOverUnity,
    InstanceTooLarge,
    DegenerateVariance,
    DimensionMismatch,
    Io,
};

const char* errc_name(Errc code) noexcept;

/// All library failures are reported as this exception; `code()` identifies the kind.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace mftpe
