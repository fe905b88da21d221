#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lsgda {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Mismatched vector/matrix sizes at an API boundary.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration value (schedules, run parameters, JSON configs).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A linear system required by an oracle has no unique solution.
class SingularSystemError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent dataset content.
class DataError : public Error {
 public:
  using Error::Error;
};

// File I/O failure (open/read/write).
class IoError : public Error {
 public:
  using Error::Error;
};

// An oracle (saddle point, envelope, robust evaluation) is not available
// for the problem at hand.
class OracleError : public Error {
 public:
  using Error::Error;
};

// An iterate left the trusted numeric range during a run.
class DivergenceError : public Error {
 public:
  DivergenceError(int64_t iteration, int node, const std::string& msg)
      : Error(msg), iteration(iteration), node(node) {}
  int64_t iteration;
  int node;
};

// Structured IDX parse failure; `kind` distinguishes the cause.
class IdxError : public Error {
 public:
  enum class Kind { BadMagic, Truncated, CountMismatch };
  IdxError(Kind kind, const std::string& msg) : Error(msg), kind(kind) {}
  Kind kind;
};

}  // namespace lsgda
