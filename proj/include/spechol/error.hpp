#pragma once

#include <stdexcept>
#include <string>

namespace spechol {

enum class ErrorCode {
  InvalidArgument = 1,
  Parse,
  DegenerateAxis,
  SingularConfiguration,
  HostEvaluation,
  Miss,
  Domain,
  Unsupported,
  DegenerateGeometry,
  ShellTooThin,
  Resolution,
  Collision,
  Pole,
  Unmachinable,
  Envelope,
  Io,
};

const char* error_code_name(ErrorCode code);

// All library failures are reported through this exception; the C API maps
// the code onto its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by build_ridging when a band cannot fit the shell; carries the
// half-thickness that would have been needed.
class ShellTooThinError : public Error {
 public:
  ShellTooThinError(const std::string& what, double required_delta)
      : Error(ErrorCode::ShellTooThin, what), required_delta_(required_delta) {}
  double required_delta() const noexcept { return required_delta_; }

 private:
  double required_delta_;
};

}  // namespace spechol
