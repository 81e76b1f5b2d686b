#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gatsim {

// Invalid parameters or configuration. Maps to CLI exit code 2.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computed quantity violates an invariant it must satisfy (for example a
// variance below -1e-9). Maps to CLI exit code 3.
class NumericalConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Attention was requested for a node with no neighbors.
class IsolatedNodeError : public std::runtime_error {
 public:
  explicit IsolatedNodeError(std::size_t node)
      : std::runtime_error("node " + std::to_string(node) + " has no neighbors"), node_(node) {}
  std::size_t node() const noexcept { return node_; }

 private:
  std::size_t node_;
};

// Malformed text input (graph dump, config file, CSV). Carries a 1-based line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace gatsim
