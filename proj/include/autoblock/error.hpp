#pragma once

#include <stdexcept>
#include <string>

namespace autoblock {

/// Runtime failure: bad input data, corrupt files, violated preconditions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or command-line usage (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace autoblock
