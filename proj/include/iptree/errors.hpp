#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace iptree {

// Failure categories surfaced by the library. The CLI maps these onto
// process exit codes, tests match on them.
enum class Err {
  // tree structure
  DuplicateId,
  Cycle,
  SingletonMoveSpace,
  Disconnected,
  UnknownId,
  NotAPartition,
  TerminalSituation,
  NotADescendant,
  // gambles and carriers
  CarrierMismatch,
  NotMeasurable,
  NonFiniteValue,
  // local models
  MassNotNormalized,
  DeltaOutOfRange,
  EmptyCredalSet,
  // desirability
  EmptyConditioningEvent,
  UnboundedPrice,
  // inference and oracle
  EpsilonNegative,
  InvalidSelection,
  EnumerationCapExceeded,
  // laws
  InvalidPlan,
  NonPositiveParameter,
  EpsilonOutOfRange,
  RealizedNotInHorizon,
  // markov
  NonPositiveHorizon,
  SizeCapExceeded,
  // documents
  Parse,
};

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  Error(Err code, const std::string& message, std::uint64_t count)
      : std::runtime_error(message), code_(code), count_(count) {}

  Err code() const noexcept { return code_; }

  // For cap overruns: how many items the refused computation would need.
  // Saturates at UINT64_MAX.
  std::uint64_t count() const noexcept { return count_; }

 private:
  Err code_;
  std::uint64_t count_ = 0;
};

[[noreturn]] inline void fail(Err code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace iptree
