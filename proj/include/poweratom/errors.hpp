#pragma once

#include <stdexcept>
#include <string>

namespace poweratom {

// Exit-code contract of the CLI: parameter errors map to 2, numeric
// failures to 3, unconverged-but-completed runs to 4.
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operation called on an object whose prerequisite state is missing
// (e.g. Z-scaled accessors before the universal function is solved).
struct StateError : std::logic_error {
    using std::logic_error::logic_error;
};

// A diagnostic consistency check failed (e.g. an energy curve that is
// non-monotone beyond solver noise).
struct DiagnosticError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace poweratom
