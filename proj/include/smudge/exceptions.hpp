#pragma once

#include <stdexcept>
#include <string>

namespace smudge {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad configuration, malformed input files, violated preconditions.
/// CLI maps this to exit code 2.
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Mismatch between supplied state and expectations, e.g. a manifest
/// whose fingerprint does not match the dataset it is replayed on.
/// CLI maps this to exit code 3.
struct StateError : Error {
    explicit StateError(const std::string& msg) : Error(msg) {}
};

/// I/O failure (unreadable file, failed write).
struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

/// A classifier could not be fitted on the given data.
struct FitError : Error {
    explicit FitError(const std::string& msg) : Error(msg) {}
};

} // namespace smudge
