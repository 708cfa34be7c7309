#pragma once

#include <stdexcept>
#include <string>

namespace vora {

enum class ErrorCode {
  MalformedCsv,
  DuplicateWavelength,
  UnsortedWavelength,
  InsufficientCoverage,
  RankDeficient,
  InvalidGrid,
  GridMismatch,
  NonPositiveFilter,
  OutOfBox,
  ShapeMismatch,
  StepTooLarge,
  BadBasisSpec,
  SingularSystem,
  NoAscent,
  InvalidConfig,
  Io,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// callers (the CLI in particular) can map them onto exit statuses.
class VoraError : public std::runtime_error {
 public:
  VoraError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace vora
