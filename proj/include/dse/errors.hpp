#pragma once

#include <stdexcept>
#include <string>

namespace dse {

/// Broad failure categories; the CLI maps these onto exit codes.
enum class ErrorKind {
  Format,      ///< malformed or mis-labelled input data
  Size,        ///< too few samples / dimensions below the estimable minimum
  Range,       ///< empty, reversed or out-of-range interval
  Config,      ///< invalid (topology, hypothesis) pairing or bad scenario values
  Shape,       ///< vector/matrix dimension mismatch
  Degenerate,  ///< all-zero or otherwise unusable measurement content
  Numerical,   ///< singular solve, divergent integration
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_error(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

}  // namespace dse
