#pragma once

#include <stdexcept>
#include <string>

namespace nsn {

/// Malformed or inconsistent run configuration (unknown key, bad value).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Problems reading or validating input data files.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace nsn
