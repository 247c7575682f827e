#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ehsched {

using Vec = std::vector<double>;
using Mat = std::vector<std::vector<double>>;

// Absolute tolerance on energy/bandwidth constraint comparisons.
// Instances are O(1)-O(10) scaled, so absolute is appropriate.
inline constexpr double kFeasTol = 1e-9;

// Thrown when input data violates its documented preconditions.
class InvalidInput : public std::runtime_error {
 public:
  explicit InvalidInput(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a subproblem has an empty feasible set.
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an instance exceeds a solver's size cap.
class SizeError : public std::runtime_error {
 public:
  explicit SizeError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an instance shape is outside a solver's supported class
// (e.g. weighted or multi-receiver instances on the fast path).
class UnsupportedConfiguration : public std::runtime_error {
 public:
  explicit UnsupportedConfiguration(const std::string& what) : std::runtime_error(what) {}
};

inline Mat make_mat(std::size_t rows, std::size_t cols, double value = 0.0) {
  return Mat(rows, Vec(cols, value));
}

}  // namespace ehsched
