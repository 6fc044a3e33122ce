#include "uiknow/error.hpp"

namespace uiknow {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::OutOfBounds:
      return "OutOfBounds";
    case ErrorKind::DegenerateBox:
      return "DegenerateBox";
    case ErrorKind::EmptyImage:
      return "EmptyImage";
    case ErrorKind::ImageDecode:
      return "ImageDecode";
    case ErrorKind::EnvDisconnected:
      return "EnvDisconnected";
    case ErrorKind::InvalidActionIndex:
      return "InvalidActionIndex";
    case ErrorKind::UnknownState:
      return "UnknownState";
    case ErrorKind::RestoreUnsupported:
      return "RestoreUnsupported";
    case ErrorKind::AnchorSourceUnavailable:
      return "AnchorSourceUnavailable";
    case ErrorKind::InvalidModel:
      return "InvalidModel";
    case ErrorKind::ModelTimeout:
      return "ModelTimeout";
    case ErrorKind::ModelRefusal:
      return "ModelRefusal";
    case ErrorKind::ModelRequestRejected:
      return "ModelRequestRejected";
    case ErrorKind::DimensionMismatch:
      return "DimensionMismatch";
    case ErrorKind::MissingPlaceholder:
      return "MissingPlaceholder";
    case ErrorKind::TemplateNotFound:
      return "TemplateNotFound";
    case ErrorKind::ScriptExhausted:
      return "ScriptExhausted";
    case ErrorKind::EmptyTaskList:
      return "EmptyTaskList";
    case ErrorKind::UnparseableAction:
      return "UnparseableAction";
    case ErrorKind::UnknownActionType:
      return "UnknownActionType";
    case ErrorKind::MissingField:
      return "MissingField";
    case ErrorKind::SkippedNoTarget:
      return "SkippedNoTarget";
    case ErrorKind::PreconditionViolation:
      return "PreconditionViolation";
    case ErrorKind::CorruptStore:
      return "CorruptStore";
    case ErrorKind::EmptyResultSet:
      return "EmptyResultSet";
    case ErrorKind::InvalidDataset:
      return "InvalidDataset";
    case ErrorKind::InvalidConfig:
      return "InvalidConfig";
    case ErrorKind::Io:
      return "Io";
  }
  return "Unknown";
}

std::optional<ErrorKind> error_kind_from_string(std::string_view name) noexcept {
  for (int k = 0; k <= static_cast<int>(ErrorKind::Io); ++k) {
    if (to_string(static_cast<ErrorKind>(k)) == name) return static_cast<ErrorKind>(k);
  }
  return std::nullopt;
}

}  // namespace uiknow
