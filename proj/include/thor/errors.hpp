#pragma once

#include <stdexcept>
#include <string>

namespace thor {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes of operands do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A scalar argument is outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Input is well-formed but mathematically degenerate (zero norm, G_11 <= 0, ...).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// On-disk data does not follow its declared format.
class FormatError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

// A quantity that must be non-negative by construction came out clearly negative.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Dataset or feature directory cannot be read.
class IngestionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A multi-run experiment could not persist or reload its state.
class ExperimentError : public Error {
 public:
  using Error::Error;
};

}  // namespace thor
