#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rydsim {

// Raised when an estimator has no counts to normalise against (empty
// accidental peaks, zero heralds, an empty window). Maps to CLI exit code 3.
class InsufficientStatistics : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Scenario or problem description that failed validation. Carries one
// diagnostic per offending field. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> diagnostics);
  const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

}  // namespace rydsim
