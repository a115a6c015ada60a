#pragma once

#include <stdexcept>
#include <string>

namespace lapreg {

/// Bad input: sizes, labels, files, flags. The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solver or quadrature failure. The CLI maps this to exit code 2.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class GraphErrc {
  invalid_size,
  self_loop,
  duplicate_edge,
  missing_edge,
  would_disconnect,
  unknown_vertex,
  disconnected,
  parse,
};

const char* to_string(GraphErrc code) noexcept;

class GraphError : public ValidationError {
 public:
  GraphError(GraphErrc code, const std::string& what)
      : ValidationError(std::string(to_string(code)) + ": " + what), code_(code) {}

  GraphErrc code() const noexcept { return code_; }

 private:
  GraphErrc code_;
};

}  // namespace lapreg
