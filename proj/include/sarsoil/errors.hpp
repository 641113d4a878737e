#pragma once

#include <stdexcept>
#include <string>

namespace sarsoil {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numeric argument is outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An invalid configuration value (network spec, parameter ranges, options).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Vector/matrix dimensions do not match.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A file could not be parsed. `line` is 1-based, 0 when unknown.
class FormatError : public Error {
 public:
  FormatError(const std::string& message, int line = 0)
      : Error(line > 0 ? message + " (line " + std::to_string(line) + ")" : message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_ = 0;
};

/// A calibration fit failed (rank deficiency, unmet preconditions, divergence).
class FitError : public Error {
 public:
  using Error::Error;
};

/// Neural-network training failed (singular normal equations).
class TrainingError : public Error {
 public:
  using Error::Error;
};

/// Rasters do not share the same grid.
class GridError : public Error {
 public:
  using Error::Error;
};

/// A point falls outside a raster's extent.
class BoundsError : public Error {
 public:
  using Error::Error;
};

/// A required input is missing (e.g. C-band reflectivity on the bare branch).
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace sarsoil
