#pragma once

#include <stdexcept>
#include <string>

namespace classo {

// Error taxonomy mirrors the CLI exit codes: SpecError -> 2, IoError -> 3,
// NumericalError -> 4.
struct SpecError : std::runtime_error {
    explicit SpecError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Parameters outside the validity region of a closed-form bound (for example
// chi <= 0 in the orthogonal mCSV bound). Callers that sweep a grid catch this
// to emit a status column instead of aborting.
struct RegimeError : SpecError {
    explicit RegimeError(const std::string& msg) : SpecError(msg) {}
};

}  // namespace classo
