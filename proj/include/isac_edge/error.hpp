#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace isac_edge {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  NotApplicable,
  Infeasible,
  Numerical,
  Schema,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

/// Structured error carrying a machine-readable code next to the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the pipeline when a task's sensing threshold cannot be met.
class InfeasibleTask : public Error {
 public:
  InfeasibleTask(std::size_t task, const std::string& what)
      : Error(ErrorCode::Infeasible, what), task_(task) {}

  std::size_t task() const noexcept { return task_; }

 private:
  std::size_t task_;
};

}  // namespace isac_edge
