#pragma once

#include <stdexcept>
#include <string>

namespace spikehar {

// Shape or size disagreement between operands.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Bad argument value (out-of-range label, epoch outside schedule, ...).
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// NaN/Inf encountered where finite values are required.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// API misuse, e.g. backward before forward.
struct StateError : std::logic_error {
    using std::logic_error::logic_error;
};

// Filesystem problem; message names the offending path.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed file contents; message carries file and line where possible.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Checkpoint written by an incompatible format version.
struct VersionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace spikehar
