#pragma once

#include <stdexcept>
#include <string>

namespace mrst {

/// Invalid argument to a library operation (bad shape, negative threshold, NaN input, ...).
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Malformed or truncated binary/text artifact.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Operation not defined for the given acquisition geometry (e.g. FBP on fan-beam data).
struct UnsupportedGeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw ArgumentError(what);
}

}  // namespace mrst
