#pragma once

#include <stdexcept>
#include <string>

namespace thue {

enum class Errc {
  CycleDetected,
  DisconnectedInput,
  DuplicateChild,
  UnknownVertex,
  PathTooLong,
  InfeasibleParameters,
  InvalidParameter,
  InputTooLarge,
  UncoloredAncestor,
  PartialColoringGiven,
  SeedIndexOutOfRange,
  ListSizeMismatch,
  ConfigMismatch,
  MalformedLog,
  ColorNotInList,
  InvalidWalk,
  SearchSpaceTooLarge,
  BudgetExhausted,
  SpecParseError,
  InternalInvariant,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::CycleDetected: return "CycleDetected";
    case Errc::DisconnectedInput: return "DisconnectedInput";
    case Errc::DuplicateChild: return "DuplicateChild";
    case Errc::UnknownVertex: return "UnknownVertex";
    case Errc::PathTooLong: return "PathTooLong";
    case Errc::InfeasibleParameters: return "InfeasibleParameters";
    case Errc::InvalidParameter: return "InvalidParameter";
    case Errc::InputTooLarge: return "InputTooLarge";
    case Errc::UncoloredAncestor: return "UncoloredAncestor";
    case Errc::PartialColoringGiven: return "PartialColoringGiven";
    case Errc::SeedIndexOutOfRange: return "SeedIndexOutOfRange";
    case Errc::ListSizeMismatch: return "ListSizeMismatch";
    case Errc::ConfigMismatch: return "ConfigMismatch";
    case Errc::MalformedLog: return "MalformedLog";
    case Errc::ColorNotInList: return "ColorNotInList";
    case Errc::InvalidWalk: return "InvalidWalk";
    case Errc::SearchSpaceTooLarge: return "SearchSpaceTooLarge";
    case Errc::BudgetExhausted: return "BudgetExhausted";
    case Errc::SpecParseError: return "SpecParseError";
    case Errc::InternalInvariant: return "InternalInvariant";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

// Structural invariant check that stays on in release builds; these guard
// decoder synchronization and detector self-consistency, where a silent
// miscompute would corrupt results rather than crash.
#define THUE_CHECK(cond, msg)                                   \
  do {                                                          \
    if (!(cond)) throw ::thue::Error(::thue::Errc::InternalInvariant, msg); \
  } while (0)

}  // namespace thue
