#pragma once

#include <stdexcept>
#include <string>

namespace oscil {

// Bad user-supplied values: malformed fractions, violated preconditions,
// parameters outside a supported regime.
struct input_error : std::invalid_argument {
    explicit input_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// A configurable budget (enumeration cap, interval cap, refinement cap)
// was exceeded.  The computation is sound, just too large as requested.
struct resource_error : std::runtime_error {
    explicit resource_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace oscil
