#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace trapnoise {

// Argument outside the mathematical domain of an operation (non-positive
// frequency, T >= Tc for a London depth, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Malformed or inconsistent configuration file. Carries the source location.
class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string& what, std::string file = {}, std::size_t line = 0,
              std::size_t column = 0);

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::string file_;
  std::size_t line_;
  std::size_t column_;
};

// Bad measurement data (CSV schema, too few records, ...). `row` is 1-based
// and counts the header as row 1; 0 means "not tied to a row".
class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& what, std::size_t row = 0);
  std::size_t row() const noexcept { return row_; }

private:
  std::size_t row_;
};

// Quadrature non-convergence, fit failure, degenerate Fresnel denominators.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace trapnoise
