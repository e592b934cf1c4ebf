#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aor {

enum class ErrorKind {
  Parse,                 // malformed document, record, or protocol text
  Schema,                // record does not match the canonical schema
  NoObjects,             // KB declares an empty object list
  DanglingReference,     // edge or restriction points at an unknown id
  Cycle,                 // hierarchy or causal graph contains a cycle
  UnknownId,             // query names an id the KB does not contain
  RestrictionViolation,  // (object, attribute) pair outside the allowed set
  CausalConflict,        // child attribute present, parent explicitly absent
  InvalidBox,            // degenerate or out-of-bounds box
  MissingBox,            // study graph lacks a box for an inspected region
  GoldMismatch,          // derived answer disagrees with the source gold answer
  InvalidArgument,
  Io,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::NoObjects: return "no-objects";
    case ErrorKind::DanglingReference: return "dangling-reference";
    case ErrorKind::Cycle: return "cycle";
    case ErrorKind::UnknownId: return "unknown-id";
    case ErrorKind::RestrictionViolation: return "restriction-violation";
    case ErrorKind::CausalConflict: return "causal-conflict";
    case ErrorKind::InvalidBox: return "invalid-box";
    case ErrorKind::MissingBox: return "missing-box";
    case ErrorKind::GoldMismatch: return "gold-mismatch";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

// Single exception type for every pipeline failure; the kind keeps errors
// distinguishable for callers and tests without a type per failure mode.
class Error : public std::runtime_error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  Error(ErrorKind kind, const std::string& message, std::size_t offset = npos)
      : std::runtime_error(std::string("[") + to_string(kind) + "] " + message +
                           (offset == npos ? "" : " (byte " + std::to_string(offset) + ")")),
        kind_(kind),
        offset_(offset) {}

  ErrorKind kind() const noexcept { return kind_; }

  // Byte offset into the offending text, when the failure has one.
  std::size_t offset() const noexcept { return offset_; }

 private:
  ErrorKind kind_;
  std::size_t offset_;
};

}  // namespace aor
