// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace ratgreedy {

/// Base of every exception thrown by the core library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A value lies outside the admissible set (interval, pole window, exponent range).
class DomainError : public Error {
public:
  using Error::Error;
};

/// A pole-kind element was evaluated exactly at its pole.
class PoleEvaluationError : public Error {
public:
  using Error::Error;
};

class QuadratureError : public Error {
public:
  QuadratureError(const std::string& what, double last_estimate)
      : Error(what), last_estimate_(last_estimate) {}
  double last_estimate() const noexcept { return last_estimate_; }

private:
  double last_estimate_;
};

/// Basis with repeated parameters (singular Gram / minimax system).
class SingularBasisError : public Error {
public:
  using Error::Error;
};

class UnsupportedConversionError : public Error {
public:
  using Error::Error;
};

/// Cholesky or eigen-solver failure on input that should have been SPD.
class FactorizationError : public Error {
public:
  using Error::Error;
};

/// Report files could not be written.
class IoError : public Error {
public:
  using Error::Error;
};

/// Schema violation in an experiment document; `key()` names the offending entry.
class ConfigError : public Error {
public:
  ConfigError(std::string key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

private:
  std::string key_;
};

} // namespace ratgreedy
