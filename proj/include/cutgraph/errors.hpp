#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cutgraph {

// Exact algorithm asked to run beyond its enumeration budget.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative solver failed to reach its tolerance; carries the last iterate
// so callers can inspect how far it got.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> last_iterate,
                   double last_value, std::size_t iterations)
      : std::runtime_error(what),
        last_iterate(std::move(last_iterate)),
        last_value(last_value),
        iterations(iterations) {}

  std::vector<double> last_iterate;
  double last_value = 0.0;
  std::size_t iterations = 0;
};

// Bad run file / CLI configuration (maps to exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cutgraph
