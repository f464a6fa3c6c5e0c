#pragma once

#include <stdexcept>
#include <string>

namespace smc {

// Configuration and input problems: bad flags, malformed models, structural
// mismatches. The CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public ConfigError {
 public:
  ParseError(const std::string& message, int line, int column)
      : ConfigError(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class CompileError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class LookupError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Failures that only show up while running an algorithm. Exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParameterDomainError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateWeightsError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace smc
