#pragma once

#include <stdexcept>
#include <string>

namespace ktsim {

// Invalid parameters or configuration. `field()` carries a dotted path
// (e.g. "experiment.noise_rate") when the error originates in a config document.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& message, std::string field = {})
      : std::invalid_argument(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ktsim
