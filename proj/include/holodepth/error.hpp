#pragma once

#include <stdexcept>
#include <string>

namespace holodepth {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Array extents that violate an operation's shape requirements.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid scalar parameter (non-positive pitch, n < 2, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Sweep range that is empty or malformed.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Binary or text file that does not match its documented layout.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failure: missing input, unwritable output.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Emits a warning line on stderr. Library code never aborts on warnings.
void warn(const std::string& message);

}  // namespace holodepth
