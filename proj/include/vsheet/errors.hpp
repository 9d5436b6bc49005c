#pragma once

#include <stdexcept>
#include <string>

namespace vsheet {

enum class ErrorKind {
    invalid_input,
    out_of_range,
    collapse_regime,
    degenerate_exponent,
    invalid_profile,
    window_too_wide,
    no_valid_samples,
    singular_configuration,
    blow_up,
    missing_series,
    load_error,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base exception for every domain error raised by the library.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

inline void require(bool condition, ErrorKind kind, const std::string& what) {
    if (!condition) fail(kind, what);
}

}  // namespace vsheet
