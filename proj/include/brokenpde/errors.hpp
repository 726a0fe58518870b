#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace brokenpde {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
public:
  SyntaxError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

class UnknownIdentifier : public Error {
public:
  UnknownIdentifier(const std::string& name, std::size_t offset)
      : Error("unknown identifier '" + name + "' at offset " + std::to_string(offset)),
        name_(name), offset_(offset) {}
  const std::string& name() const noexcept { return name_; }
  std::size_t offset() const noexcept { return offset_; }

private:
  std::string name_;
  std::size_t offset_;
};

class EvalError : public Error {
public:
  using Error::Error;
};

class NonDifferentiable : public Error {
public:
  using Error::Error;
};

class OutOfBounds : public Error {
public:
  using Error::Error;
};

class InvalidArgument : public Error {
public:
  using Error::Error;
};

class NoConvergence : public Error {
public:
  NoConvergence(const std::string& what, int iterations, double residual)
      : Error(what), iterations_(iterations), residual_(residual) {}
  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

private:
  int iterations_;
  double residual_;
};

/// A transform was requested for the wrong coefficient regime (s = 0 vs s > 0).
class WrongRegime : public Error {
public:
  using Error::Error;
};

class DegenerateGradient : public Error {
public:
  DegenerateGradient(const std::string& what, double gradient_norm)
      : Error(what), gradient_norm_(gradient_norm) {}
  double gradient_norm() const noexcept { return gradient_norm_; }

private:
  double gradient_norm_;
};

class DegenerateH : public Error {
public:
  DegenerateH(const std::string& what, double h_value) : Error(what), h_value_(h_value) {}
  double h_value() const noexcept { return h_value_; }

private:
  double h_value_;
};

class RadiiTooSmall : public Error {
public:
  using Error::Error;
};

class ZeroPolynomial : public Error {
public:
  using Error::Error;
};

class NoSignChange : public Error {
public:
  using Error::Error;
};

/// Malformed or schema-violating configuration; `key()` names the offending entry.
class ConfigError : public Error {
public:
  ConfigError(const std::string& key, const std::string& what)
      : Error("config key '" + key + "': " + what), key_(key) {}
  const std::string& key() const noexcept { return key_; }

private:
  std::string key_;
};

}  // namespace brokenpde
