#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace uiknow {

enum class ErrorKind {
  // images and observations
  OutOfBounds,
  DegenerateBox,
  EmptyImage,
  ImageDecode,
  // environment
  EnvDisconnected,
  InvalidActionIndex,
  UnknownState,
  RestoreUnsupported,
  AnchorSourceUnavailable,
  InvalidModel,
  // model gateway
  ModelTimeout,
  ModelRefusal,
  ModelRequestRejected,
  DimensionMismatch,
  MissingPlaceholder,
  TemplateNotFound,
  ScriptExhausted,
  // explorer / agent
  EmptyTaskList,
  UnparseableAction,
  UnknownActionType,
  MissingField,
  // miner
  SkippedNoTarget,
  PreconditionViolation,
  // store
  CorruptStore,
  // evaluation
  EmptyResultSet,
  InvalidDataset,
  // configuration and I/O
  InvalidConfig,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;
std::optional<ErrorKind> error_kind_from_string(std::string_view name) noexcept;

/// Single exception type for every domain failure; `kind()` carries the
/// specific error so callers can branch without a type hierarchy.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace uiknow
