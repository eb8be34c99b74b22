#pragma once

#include <stdexcept>
#include <string>

namespace svmf {

// Base class for all engine errors. The CLI maps these to exit code 2,
// anything else to exit code 3.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input bytes (bad TSV row, bad JSON line). Carries a 1-based
// line number when the input is line-oriented.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error(msg) {}
  ParseError(std::size_t line, const std::string& msg)
      : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_ = 0;
};

// Structurally valid input that violates a documented invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Unknown class id, instance id, or index key.
class LookupError : public Error {
 public:
  using Error::Error;
};

// Arguments outside an operation's domain (lower-triangular cell, a == b).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Corrupt, truncated, or wrong-version binary payload.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Duplicate key on index insertion.
class ConflictError : public Error {
 public:
  using Error::Error;
};

// Fingerprints or indexes with mismatched catalog size n.
class ComparisonError : public Error {
 public:
  using Error::Error;
};

// Synthetic spec that cannot be realized (boxes larger than the canvas).
class GenerationError : public Error {
 public:
  using Error::Error;
};

}  // namespace svmf
