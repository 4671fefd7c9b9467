#include "itn/error.hpp"

namespace itn {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::NodeOutOfRange: return "NodeOutOfRange";
    case ErrorCode::DuplicateLabel: return "DuplicateLabel";
    case ErrorCode::TooFewNodes: return "TooFewNodes";
    case ErrorCode::EmptyNetwork: return "EmptyNetwork";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::NegativeValue: return "NegativeValue";
    case ErrorCode::NonPositiveGdp: return "NonPositiveGdp";
    case ErrorCode::Io: return "Io";
    case ErrorCode::NonPositiveSample: return "NonPositiveSample";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::DegenerateSigma: return "DegenerateSigma";
    case ErrorCode::TooFewBins: return "TooFewBins";
    case ErrorCode::InsufficientOverlap: return "InsufficientOverlap";
    case ErrorCode::DegenerateAbscissa: return "DegenerateAbscissa";
    case ErrorCode::TooFewEdges: return "TooFewEdges";
    case ErrorCode::TooFewDegreeClasses: return "TooFewDegreeClasses";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::IsolatedPositiveStrength: return "IsolatedPositiveStrength";
    case ErrorCode::CoincidentPoints: return "CoincidentPoints";
    case ErrorCode::BudgetExhausted: return "BudgetExhausted";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace itn
