#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace ucdsc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Sentinel label for samples from classes outside the known set.
// Never valid in training data.
inline constexpr int kUnknownLabel = -1;

// Raised for malformed run configurations (maps to CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ucdsc
