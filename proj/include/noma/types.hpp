#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace noma {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Requested model (modulation, collision order) has no analytic form.
class UnsupportedModelError : public std::runtime_error {
 public:
  explicit UnsupportedModelError(const std::string& what) : std::runtime_error(what) {}
};

/// A tractability guard was exceeded (tensor size, enumeration count).
class ResourceLimitError : public std::runtime_error {
 public:
  explicit ResourceLimitError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace noma
