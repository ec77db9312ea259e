#pragma once

#include <stdexcept>
#include <string>

namespace largevar {

// Base of every error raised by the library. Callers that only need to
// distinguish "our" failures from foreign ones catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments: wrong dimensions, non-finite entries, out-of-range knobs.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// B in the pencil (A, B) is not positive definite.
class SingularPencil : public Error {
 public:
  SingularPencil(const std::string& what, double smallest_pivot)
      : Error(what), smallest_pivot_(smallest_pivot) {}
  double smallest_pivot() const noexcept { return smallest_pivot_; }

 private:
  double smallest_pivot_;
};

// Residual cross-products are rank deficient, e.g. T/N <= 2 or duplicated series.
class DegenerateSample : public Error {
 public:
  using Error::Error;
};

// Dimension ratio outside the range where the edge asymptotics are defined.
class UnsupportedRegime : public Error {
 public:
  using Error::Error;
};

// Missing quantile-table entry, unknown experiment kind and similar.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input file could not be parsed; message carries the location.
class ParseError : public Error {
 public:
  using Error::Error;
};

class SchemaVersionError : public Error {
 public:
  using Error::Error;
};

// Roundoff beyond the clamp tolerance: indicates a broken pipeline, not noise.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace largevar
