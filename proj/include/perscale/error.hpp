#pragma once

#include <stdexcept>
#include <string>

namespace perscale {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed user input: bad config fields, inconsistent intermediate files.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A configured resource guard (point count, simplex count) was exceeded.
class ResourceLimitError : public Error {
 public:
  using Error::Error;
};

}  // namespace perscale
