#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace popeq {

enum class ErrorKind {
  InvalidArgument,
  WindowTooSmall,
  NoSignChange,
  UnstableEquilibrium,
  MultipleRoots,
  SingularSystem,
  RateOverflow,
  StuckState,
  ConfigError,
};

std::string_view error_name(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the ErrorKind tags, so
/// the CLI can render it as a machine-readable object.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept { return error_name(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace popeq
