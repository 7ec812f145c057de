#pragma once

#include <stdexcept>
#include <string>

namespace gsa {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A frequency lies at or beyond the band edges of a waveguide.
class OutOfBand : public Error {
public:
    using Error::Error;
};

class Degenerate : public Error {
public:
    using Error::Error;
};

class NotTopological : public Error {
public:
    using Error::Error;
};

class NotResonant : public Error {
public:
    using Error::Error;
};

/// Norm of a Hermitian propagation drifted past the allowed bound; dt is too large.
class NormDrift : public Error {
public:
    using Error::Error;
};

/// Invalid system or run configuration. `path` names the offending key when known.
class ConfigError : public Error {
public:
    ConfigError(std::string path, const std::string& message)
        : Error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Configuration is well-formed but physically inconsistent (out-of-band mode, light-cone overflow).
class PhysicsViolation : public ConfigError {
public:
    using ConfigError::ConfigError;
};

}  // namespace gsa
