#include "causalpre/error.hpp"

namespace causalpre {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingRole: return "MissingRole";
    case ErrorCode::NoLabel: return "NoLabel";
    case ErrorCode::MultipleLabels: return "MultipleLabels";
    case ErrorCode::UnknownCategory: return "UnknownCategory";
    case ErrorCode::UnknownAttribute: return "UnknownAttribute";
    case ErrorCode::ContinuousColumn: return "ContinuousColumn";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::MalformedConfig: return "MalformedConfig";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::EmptyAttrSet: return "EmptyAttrSet";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::SameAttribute: return "SameAttribute";
    case ErrorCode::TooManyAttributes: return "TooManyAttributes";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::DomainTooLarge: return "DomainTooLarge";
    case ErrorCode::MemberAlreadyInClique: return "MemberAlreadyInClique";
    case ErrorCode::EmptyClique: return "EmptyClique";
    case ErrorCode::CandidateTooSmall: return "CandidateTooSmall";
    case ErrorCode::InfeasibleParams: return "InfeasibleParams";
    case ErrorCode::EmptyInit: return "EmptyInit";
    case ErrorCode::SeparatorInfeasible: return "SeparatorInfeasible";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::AttrMismatch: return "AttrMismatch";
    case ErrorCode::UnassignedSeparator: return "UnassignedSeparator";
    case ErrorCode::IncompleteRecord: return "IncompleteRecord";
    case ErrorCode::NoFairAttributes: return "NoFairAttributes";
    case ErrorCode::PlanDatasetMismatch: return "PlanDatasetMismatch";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::NonBinaryOutcome: return "NonBinaryOutcome";
    case ErrorCode::NoSensitiveVariation: return "NoSensitiveVariation";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::ContextExplosion: return "ContextExplosion";
    case ErrorCode::CyclicSpec: return "CyclicSpec";
    case ErrorCode::MalformedCpt: return "MalformedCpt";
  }
  return "Unknown";
}

}  // namespace causalpre
