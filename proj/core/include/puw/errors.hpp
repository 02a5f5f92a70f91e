#pragma once

#include <stdexcept>
#include <string>

namespace puw {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// No admissible instance in the task supply — the liveness deadlock case.
struct EmptySupply : Error {
  using Error::Error;
};

struct UnknownClass : Error {
  using Error::Error;
};

// Proof claims a different task class than the task it is checked against.
struct ClassMismatch : Error {
  using Error::Error;
};

struct MissingTransform : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct TooLarge : Error {
  using Error::Error;
};

struct InsufficientData : Error {
  using Error::Error;
};

struct InvalidProof : Error {
  using Error::Error;
};

struct MissingTrace : Error {
  using Error::Error;
};

struct ParseError : Error {
  int line;
  ParseError(int line_no, const std::string& msg)
      : Error("line " + std::to_string(line_no) + ": " + msg), line(line_no) {}
};

}  // namespace puw
