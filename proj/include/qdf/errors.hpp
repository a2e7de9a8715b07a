#pragma once

#include <stdexcept>
#include <string>

namespace qdf {

// Callers distinguish bad arguments (usage errors) from numerical breakdown
// (truncation budget exhausted, non-convergent series).  The CLI maps the
// former to exit code 2 and the latter to exit code 3.

struct DimensionError : std::invalid_argument {
    explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

struct RangeError : std::invalid_argument {
    explicit RangeError(const std::string& what) : std::invalid_argument(what) {}
};

struct ParameterError : std::invalid_argument {
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

struct OrderError : std::invalid_argument {
    explicit OrderError(const std::string& what) : std::invalid_argument(what) {}
};

struct DegenerateStateError : std::invalid_argument {
    explicit DegenerateStateError(const std::string& what) : std::invalid_argument(what) {}
};

struct TruncationError : std::runtime_error {
    explicit TruncationError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace qdf
