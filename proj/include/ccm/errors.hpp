#pragma once

#include <stdexcept>
#include <string>

namespace ccm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A state lies on or too close to a singular denominator of a reaction term,
/// or an argument is outside the mathematical domain of an operation.
class DomainError : public Error {
public:
  using Error::Error;
};

/// The principal eigenvalue of the linearization at the source is not
/// positive, so the invading species cannot grow from low density.
class NotInvadable : public Error {
public:
  NotInvadable(const std::string& what, double gamma1_at_zero)
      : Error(what), gamma1_at_zero_(gamma1_at_zero) {}
  double gamma1_at_zero() const noexcept { return gamma1_at_zero_; }

private:
  double gamma1_at_zero_;
};

class DegenerateEigenvalue : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

/// Blow-up detected during time stepping.
class StabilityError : public Error {
public:
  StabilityError(const std::string& what, double t, std::size_t node)
      : Error(what), t_(t), node_(node) {}
  double time() const noexcept { return t_; }
  std::size_t node() const noexcept { return node_; }

private:
  double t_;
  std::size_t node_;
};

class LevelError : public Error {
public:
  using Error::Error;
};

class InsufficientSamples : public Error {
public:
  using Error::Error;
};

}  // namespace ccm
