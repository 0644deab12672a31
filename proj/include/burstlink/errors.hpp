#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace burstlink {

// Base class for every error raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A file or stream could not be opened or read.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed input row; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Structurally valid input that violates a precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Two latency CDFs never change sign order: one interface dominates.
class NoCrossingError : public Error {
 public:
  using Error::Error;
};

// A transition probability has no observations in its from-state.
class UndefinedEstimateError : public Error {
 public:
  UndefinedEstimateError(char param, const std::string& msg)
      : Error(msg), param_(param) {}
  // 'p' (good-to-bad) or 'r' (bad-to-good).
  char param() const noexcept { return param_; }

 private:
  char param_;
};

// p = r = 0: the chain never moves and has no unique stationary law.
class DegenerateChainError : public Error {
 public:
  using Error::Error;
};

// The good state has no exit (p = 0): burst statistics are undefined.
class NoBurstsError : public Error {
 public:
  using Error::Error;
};

}  // namespace burstlink
