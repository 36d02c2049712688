#pragma once

#include <stdexcept>
#include <string>

namespace metaspec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter lies outside the domain an operation is defined on.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed to converge or produced unusable output.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A mesh or chain could not be built with the requested structure.
class BuildError : public Error {
 public:
  using Error::Error;
};

/// A constructed object violates one of its structural invariants.
class StructuralError : public Error {
 public:
  using Error::Error;
};

}  // namespace metaspec
