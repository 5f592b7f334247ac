#pragma once

#include <stdexcept>
#include <string>

namespace gridfreq {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid input document (grid config, scenario, manifest, CSV, CDF).
/// The CLI maps these to the validation exit code.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Metrics or other result document missing a required key.
class SchemaError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// The network splits into parts that cannot be solved (no angle reference).
class IslandingError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace gridfreq
