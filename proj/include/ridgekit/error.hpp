#pragma once
#include <stdexcept>
#include <string>

namespace ridgekit {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : Error {
  using Error::Error;
};

struct FormatError : Error {
  using Error::Error;
};

struct ArgumentError : Error {
  using Error::Error;
};

struct DimensionError : ArgumentError {
  using ArgumentError::ArgumentError;
};

struct ParseError : Error {
  using Error::Error;
};

} // namespace ridgekit
