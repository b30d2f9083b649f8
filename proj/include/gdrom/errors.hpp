#pragma once

#include <stdexcept>
#include <string>

namespace gdrom {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error {
  ParseError(long line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line(line) {}
  long line;
};

struct GeometryError : Error {
  using Error::Error;
};

/// Factorization or convergence failure; step is -1 outside time stepping.
struct SolverError : Error {
  SolverError(long step, const std::string& what)
      : Error(step >= 0 ? "step " + std::to_string(step) + ": " + what : what),
        step(step) {}
  long step;
};

struct ConfigError : Error {
  ConfigError(const std::string& key, const std::string& what)
      : Error(key + ": " + what), key(key) {}
  std::string key;
};

struct IoError : Error {
  using Error::Error;
};

struct InsufficientData : Error {
  using Error::Error;
};

}  // namespace gdrom
