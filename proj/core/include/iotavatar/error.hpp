#pragma once

#include <stdexcept>
#include <string>

namespace iotavatar {

/// Bad membership function, variable, rule or profile definition.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A well-formed engine was called with unusable arguments.
class InvocationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Command or event parameter outside its declared bounds.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scenario text could not be parsed. `line()` is 1-based, 0 when not tied to a line.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace iotavatar
