#pragma once

#include <stdexcept>
#include <string>

namespace gmc {

enum class Errc {
    MissingColumn,
    NonNumericValue,
    FewerThanThreeSamples,
    DegenerateScale,
    EmptyDataset,
    MissingSigma,
    TooFewPoints,
    InvalidRange,
    EmptyRegion,
    SubsetTooLarge,
    LengthMismatch,
    ConfigError,
    IoError,
};

// All library failures carry a code so the CLI can map them to exit codes
// (ConfigError -> 2, everything else -> 3).
class Error : public std::runtime_error {
public:
    Error(Errc code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
    throw Error(code, message);
}

} // namespace gmc
