#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace rfid {

/// Invalid scenario, reader, or population configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (e.g. distance <= 0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Codeword of the wrong length for the declared tag width.
class FramingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller broke a documented precondition (unsorted input and the like).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input. `line` is 1-based; 0 when the input was a single
/// string with no file context.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string field, std::size_t line, std::string detail)
      : std::runtime_error(format(field, line, detail)),
        field_(std::move(field)),
        detail_(std::move(detail)),
        line_(line) {}

  const std::string& field() const noexcept { return field_; }
  const std::string& detail() const noexcept { return detail_; }
  std::size_t line() const noexcept { return line_; }

  ParseError with_line(std::size_t line) const { return {field_, line, detail_}; }

 private:
  static std::string format(const std::string& field, std::size_t line,
                            const std::string& detail) {
    std::string msg;
    if (line > 0) msg += "line " + std::to_string(line) + ": ";
    msg += field + ": " + detail;
    return msg;
  }

  std::string field_;
  std::string detail_;
  std::size_t line_;
};

}  // namespace rfid
