#pragma once

#include <stdexcept>
#include <string>

namespace tiltopt {

// Error taxonomy mirrors the CLI exit codes: config 2, I/O 3, divergence 4.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

struct DivergenceError : std::runtime_error {
  explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tiltopt
