#pragma once

#include <stdexcept>
#include <string>

namespace kikuchi {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the arguments was violated (wrong order, out-of-range
/// level, dimension mismatch, ...).
class ParameterError : public Error {
public:
  using Error::Error;
};

/// A subset had the wrong cardinality or an element outside [0, n).
class InvalidSubsetError : public ParameterError {
public:
  using ParameterError::ParameterError;
};

/// A rank outside [0, C(n, l)).
class IndexError : public ParameterError {
public:
  using ParameterError::ParameterError;
};

/// The requested object would exceed a configured memory or size cap.
class CapacityError : public Error {
public:
  using Error::Error;
};

/// The operation needs data the caller did not supply (e.g. a dense tensor).
class CapabilityError : public Error {
public:
  using Error::Error;
};

/// Correlation with a zero vector.
class UndefinedCorrelationError : public Error {
public:
  using Error::Error;
};

/// Malformed input file or configuration.
class FormatError : public Error {
public:
  using Error::Error;
};

#define KIKUCHI_REQUIRE(cond, ExcType, msg)                                    \
  do {                                                                         \
    if (!(cond)) throw ExcType(std::string(msg));                              \
  } while (0)

}  // namespace kikuchi
