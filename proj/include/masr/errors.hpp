#pragma once

#include <stdexcept>
#include <string>

namespace masr {

/// Invalid configuration or command-line input (CLI exit code 2).
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem or parse failure on an external file (CLI exit code 3).
class IoError : public std::runtime_error {
  public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace masr
