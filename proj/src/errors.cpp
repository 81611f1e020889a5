#include "trapnoise/errors.hpp"

namespace trapnoise {

namespace {

std::string located(const std::string& what, const std::string& file, std::size_t line,
                    std::size_t column) {
  if (file.empty() && line == 0) return what;
  std::string s = file.empty() ? std::string("<config>") : file;
  if (line > 0) {
    s += ":" + std::to_string(line);
    if (column > 0) s += ":" + std::to_string(column);
  }
  return s + ": " + what;
}

}  // namespace

ConfigError::ConfigError(const std::string& what, std::string file, std::size_t line,
                         std::size_t column)
    : std::runtime_error(located(what, file, line, column)),
      file_(std::move(file)),
      line_(line),
      column_(column) {}

DataError::DataError(const std::string& what, std::size_t row)
    : std::runtime_error(row > 0 ? "row " + std::to_string(row) + ": " + what : what),
      row_(row) {}

}  // namespace trapnoise
