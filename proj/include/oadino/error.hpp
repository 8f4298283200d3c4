#pragma once

#include <stdexcept>
#include <string>

namespace oadino {

// Root of every error the library throws. The CLI maps subclasses onto exit
// codes: NumericalError -> 3, everything else -> 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or truncated file contents (PPM, OADF, OAMK, OAVM, JSONL).
class FormatError : public Error {
 public:
  using Error::Error;
};

// A caller passed values that violate an operation's precondition.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Solver failed to converge, or a loss became non-finite.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Second PCA pass cannot run (fewer than two foreground patches).
class RefinementError : public Error {
 public:
  using Error::Error;
};

// Attribute requested that the annotation schema does not carry.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Inconsistent run configuration (too few queries, missing files, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Image has no foreground patches, so no joint representation exists.
class RepresentationError : public Error {
 public:
  using Error::Error;
};

// Synthetic scene could not be laid out.
class GenerationError : public Error {
 public:
  using Error::Error;
};

}  // namespace oadino
