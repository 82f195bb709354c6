#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace a4sim {

/// Invalid geometry, mask, scenario key or reference. Carries the scenario
/// line number when the error originates from scenario text (0 otherwise).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, std::size_t line = 0, std::string key = {})
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line),
        key_(std::move(key)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  std::size_t line_;
  std::string key_;
};

/// A broken runtime invariant (pacing violation, inclusive-residency breach).
class SimulationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace a4sim
