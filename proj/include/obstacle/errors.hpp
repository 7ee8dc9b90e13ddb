#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace obstacle {

/// Invalid argument to a mathematical operation (non-finite strain, eps <= 0, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A numerical procedure failed to reach its tolerance.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration. `key()` names the offending key when one applies,
/// `line()` is the 1-based source line or 0 when the error is not tied to text.
class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string& message, std::string key = {}, std::size_t line = 0)
      : std::runtime_error(message), key_(std::move(key)), line_(line) {}

  const std::string& key() const noexcept { return key_; }
  std::size_t line() const noexcept { return line_; }

private:
  std::string key_;
  std::size_t line_;
};

/// NaN or Inf appeared in the evolved fields.
class BlowUpError : public std::runtime_error {
public:
  BlowUpError(const std::string& message, std::size_t step)
      : std::runtime_error(message), step_(step) {}

  std::size_t step() const noexcept { return step_; }

private:
  std::size_t step_;
};

/// A test function reaches into the contact set.
class SupportError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed, truncated, or corrupted persisted data.
class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace obstacle
