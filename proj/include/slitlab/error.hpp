#pragma once

#include <stdexcept>
#include <string>

namespace slitlab {

/// Invalid input: bad parameters, malformed files, unknown keys.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A computation that cannot produce a meaningful number (degenerate fit,
/// all-zero density, insufficient counts).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {
inline void require(bool condition, const std::string& message)
{
    if (!condition) {
        throw ValidationError(message);
    }
}
} // namespace detail

} // namespace slitlab
