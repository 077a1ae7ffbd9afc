#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pfrac {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class MeshError : public Error {
public:
  using Error::Error;
};

/// Parse failure in a config or mesh file; message carries file:line.
class ParseError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

/// Raised when an element produces a non-finite residual or tangent entry.
class AssemblyError : public Error {
public:
  AssemblyError(const std::string& msg, int element) : Error(msg), element_id(element) {}
  int element_id;
};

class LinearSolveFailure : public Error {
public:
  using Error::Error;
};

/// Newton failed to reach the tolerance; carries the error trace of the
/// last attempt so callers can report or sub-step.
class NonConvergence : public Error {
public:
  NonConvergence(const std::string& msg, double err, std::vector<double> trace)
      : Error(msg), last_err(err), err_trace(std::move(trace)) {}
  double last_err;
  std::vector<double> err_trace;
};

} // namespace pfrac
