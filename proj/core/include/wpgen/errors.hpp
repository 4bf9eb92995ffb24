#pragma once

#include <stdexcept>
#include <string>

namespace wpgen {

enum class Errc {
  // spec validation
  ProbabilityOutOfRange,
  NonPositiveStdDev,
  KExceedsN,
  NonPositiveTrialCount,
  LabelsNotDistinct,
  EmptyPrompt,
  PromptNotSentence,
  // serialization / config files
  MalformedDocument,
  ParseError,
  InvalidConfig,
  // constrained generation
  MissingTemplate,
  UnboundSlot,
  InsufficientPool,
  // infilling
  BackendUnavailable,
  DegenerateOutput,
  // checking
  ScorerFailure,
  ZeroVector,
  // solving
  KOutOfRange,
  NonPositiveSigma,
  UnresolvableKey,
  // evaluation
  EmptyCounts,
  ZeroVariance,
  DuplicateRating,
  RatingMismatch,
  // orchestration
  BudgetExhausted,
  Aborted,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace wpgen
