#pragma once

#include <stdexcept>

namespace hetsearch {

// Invalid scenario or model parameters (bad bounds, k outside (0,1), coincident agents, ...).
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Invalid argument to a pure function (negative distance, negative density, ...).
struct ArgumentError : std::domain_error {
    using std::domain_error::domain_error;
};

// Operation requested in a mode that does not support it (range ops without a range, ...).
struct UnsupportedModeError : std::logic_error {
    using std::logic_error::logic_error;
};

} // namespace hetsearch
