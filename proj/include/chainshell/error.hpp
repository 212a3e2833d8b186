#pragma once

#include <stdexcept>
#include <string>

namespace chainshell {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Out-of-domain numeric argument.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A target that no admissible parameter can reach.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// (A, f) lies outside the feasibility envelope of the unit shape.
class EnvelopeError : public Error {
 public:
  using Error::Error;
};

/// Broken mesh topology or degenerate geometry.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Singular stiffness: the frame has unrestrained degrees of freedom.
class MechanismError : public Error {
 public:
  using Error::Error;
};

/// Invalid or inconsistent configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace chainshell
