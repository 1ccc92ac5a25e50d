#pragma once

#include <stdexcept>
#include <string>

namespace pzc {

enum class ErrorCode {
  InvalidArgument = 1,
  Io,
  Parse,
  Invariant,
  Infeasible,
  NotFound,
  TooLarge,
};

/// Every failure raised by the core carries one of the codes above so the C
/// boundary can translate it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pzc
