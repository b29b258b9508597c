#pragma once

#include <stdexcept>
#include <string>

namespace twt {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A schedule with WT + ST == 0, or WT/ST == 0 where a full cycle is needed.
class InvalidScheduleError : public Error {
 public:
  using Error::Error;
};

/// Argument outside its mathematical domain (MF outside [1, 255], negative
/// throughput, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Requested <AA, MF> cannot be realised on the standard grids.
class QuantizationError : public Error {
 public:
  using Error::Error;
};

/// Sleeptime too large for the mantissa/exponent wake interval fields.
class UnencodableError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text. Carries the 1-based line number when known (0 otherwise).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DuplicateKeyError : public Error {
 public:
  using Error::Error;
};

class SparseTableError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

/// A client with no scheduled wake time inside the horizon.
class DegenerateRateError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent problem definition (table does not cover the grid, bad spec).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace twt
