#pragma once

#include <stdexcept>
#include <string>

namespace hrl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A state, symbol or key that the container does not know about.
class LookupError : public Error {
public:
    using Error::Error;
};

/// Inputs that violate an operation's preconditions (shapes, ranges, NaNs).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Malformed files or configuration.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Bad experiment configuration: unknown keys, bad values, missing fixtures.
class ConfigError : public ParseError {
public:
    using ParseError::ParseError;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw InvalidArgument(message);
}

} // namespace hrl
