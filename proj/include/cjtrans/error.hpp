#pragma once

#include <stdexcept>
#include <string>

namespace cjtrans {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller violated an operation's precondition (empty input, bad argument).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A persisted file or an adapter reply could not be decoded.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Invalid or incomplete pipeline configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// The completion backend failed (transport, HTTP status, transcript miss).
class AdapterError : public Error {
public:
    using Error::Error;
};

/// The compiler or runner could not be invoked at all. A program that merely
/// fails to compile is not a ToolchainError.
class ToolchainError : public Error {
public:
    using Error::Error;
};

} // namespace cjtrans
