#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace causalpre {

enum class ErrorCode {
  // ingestion
  MissingRole,
  NoLabel,
  MultipleLabels,
  UnknownCategory,
  UnknownAttribute,
  ContinuousColumn,
  MalformedCsv,
  MalformedConfig,
  EmptyDataset,
  IoFailure,
  // information measures
  EmptyAttrSet,
  IndexOutOfRange,
  SameAttribute,
  TooManyAttributes,
  ShapeMismatch,
  DomainTooLarge,
  // clique engine
  MemberAlreadyInClique,
  EmptyClique,
  CandidateTooSmall,
  InfeasibleParams,
  EmptyInit,
  SeparatorInfeasible,
  TooLarge,
  // marginal model / sampler
  AttrMismatch,
  UnassignedSeparator,
  IncompleteRecord,
  NoFairAttributes,
  PlanDatasetMismatch,
  InvalidConfig,
  // metrics
  NonBinaryOutcome,
  NoSensitiveVariation,
  SchemaMismatch,
  ContextExplosion,
  // synthetic generation
  CyclicSpec,
  MalformedCpt,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure surfaced by the library. The code is stable and machine
/// readable; the message carries the human-facing detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace causalpre
