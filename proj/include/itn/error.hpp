#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace itn {

enum class ErrorCode {
  // network construction
  DuplicateEdge,
  SelfLoop,
  NonPositiveWeight,
  NodeOutOfRange,
  DuplicateLabel,
  TooFewNodes,
  EmptyNetwork,
  // ingestion
  MalformedRow,
  UnknownColumn,
  NegativeValue,
  NonPositiveGdp,
  Io,
  // statistics
  NonPositiveSample,
  TooFewSamples,
  DegenerateSigma,
  TooFewBins,
  InsufficientOverlap,
  DegenerateAbscissa,
  TooFewEdges,
  TooFewDegreeClasses,
  // null models
  NonConvergence,
  IsolatedPositiveStrength,
  // simulation
  CoincidentPoints,
  BudgetExhausted,
  InvalidConfig,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; `code()` identifies the failure
/// class, `what()` carries the offending item (pair, line number, residual).
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace itn
