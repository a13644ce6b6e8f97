#pragma once

#include <stdexcept>
#include <string>

namespace raycam {

/// Failure categories. The CLI maps these onto process exit codes.
enum class ErrorKind {
  Input = 2,      // malformed input, schema violation, bad argument
  Numerical = 3,  // underdetermined or singular problem
  Shape = 4,      // tensor/grid dimensions do not agree
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace raycam
