#pragma once

#include <stdexcept>
#include <string>

namespace pirep {

enum class ErrorKind {
    dimension,
    domain,
    numeric_failure,
    invalid_correspondence,
    invalid_representation,
    intertwiner,
    composition,
    precondition,
    resource,
    window,
    usage,
    parse,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base exception for everything thrown by the library. The kind maps
/// one-to-one onto the status codes of the C interface.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

} // namespace pirep
