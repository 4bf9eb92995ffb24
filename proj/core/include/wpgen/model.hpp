#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "wpgen/errors.hpp"

namespace wpgen {

enum class ExerciseType { Binomial, Normal };
enum class HardnessLevel { Easy = 0, Medium = 1, Hard = 2 };
enum class ConstituentKind { Prompt, Statement, Infill, Question };
enum class Provenance { UserInput, ConstrainedTemplate, UnconstrainedNLM };
enum class Verdict { Accept, RejectConflict, RejectIncoherent };

const char* to_string(ExerciseType t);
const char* to_string(HardnessLevel h);
const char* to_string(ConstituentKind k);
const char* to_string(Provenance p);
const char* to_string(Verdict v);

struct BinomialParams {
  double success_probability = 0.0;
  std::string trial_noun;                              // e.g. "traffic light"
  std::pair<std::string, std::string> outcome_labels;  // (success, failure)
  unsigned trial_count_n = 0;
  unsigned target_count_k = 0;

  bool operator==(const BinomialParams&) const = default;
};

struct NormalParams {
  double mean = 0.0;
  double std_dev = 0.0;
  std::string quantity_noun;  // e.g. "water consumption"
  std::string unit;           // opaque label, no unit algebra

  bool operator==(const NormalParams&) const = default;
};

using DistributionParams = std::variant<BinomialParams, NormalParams>;

inline ExerciseType type_of(const DistributionParams& p) {
  return std::holds_alternative<BinomialParams>(p) ? ExerciseType::Binomial : ExerciseType::Normal;
}

struct ExerciseSpec {
  std::string prompt;
  DistributionParams params;
  HardnessLevel hardness = HardnessLevel::Easy;
  std::uint64_t seed = 0;

  // The params variant is the single source of the exercise type, so the
  // type/params mismatch class of errors cannot be constructed.
  ExerciseType etype() const { return type_of(params); }

  bool operator==(const ExerciseSpec&) const = default;
};

struct SpecViolation {
  Errc code;
  std::string message;
};

// Empty result means the spec is valid; otherwise one entry per violated
// invariant.
std::vector<SpecViolation> validate_spec(const ExerciseSpec& spec);

struct Constituent {
  ConstituentKind kind = ConstituentKind::Prompt;
  std::string text;
  unsigned index = 0;  // position within its kind
  Provenance provenance = Provenance::UserInput;

  bool operator==(const Constituent&) const = default;
};

// Token sequence over {"P", "I", decimal statement indices}. Valid by
// construction: use from_tokens() which enforces the grammar.
class Arrangement {
 public:
  static Arrangement from_tokens(std::vector<std::string> tokens);

  // Grammar: starts with P (exactly one), at least one I right after P,
  // never ends in I, and the index tokens are a permutation of 0..n-1.
  // Multi-digit indices are single tokens.
  static bool grammar_ok(const std::vector<std::string>& tokens, std::string* why = nullptr);

  const std::vector<std::string>& tokens() const { return tokens_; }
  std::size_t statement_count() const;
  std::size_t infill_count() const;
  std::string str() const;  // tokens joined by one space

  bool operator==(const Arrangement&) const = default;

 private:
  explicit Arrangement(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {}
  std::vector<std::string> tokens_;
};

enum class AnswerKeyKind {
  BinomialPmf,
  BinomialAtLeast,
  BinomialAtMost,
  BinomialMean,
  NormalCdfAbove,
  NormalCdfBetween,
  NormalMean,
};

const char* to_string(AnswerKeyKind k);

// Reference to solver inputs. Unset operands resolve against the exercise's
// DistributionParams (k, n for binomial kinds); bounds are always literal.
struct AnswerKey {
  AnswerKeyKind kind = AnswerKeyKind::BinomialMean;
  std::optional<double> k;
  std::optional<double> n;
  std::optional<double> lower;
  std::optional<double> upper;

  bool operator==(const AnswerKey&) const = default;
};

struct QuestionPoolEntry {
  std::string question;
  HardnessLevel hardness = HardnessLevel::Easy;
  AnswerKey answer_key;

  bool operator==(const QuestionPoolEntry&) const = default;
};

// Structured mirror of what the statements assert. Enough to answer every
// pool question without consulting the exercise text.
struct FactSet {
  DistributionParams params;
  bool independent_trials = false;
  bool exclusive_outcomes = false;
  bool normality_assumed = false;

  bool operator==(const FactSet&) const = default;
};

struct Exercise {
  ExerciseSpec spec;
  Arrangement arrangement;
  std::vector<Constituent> context;          // realizes the arrangement in order
  std::vector<QuestionPoolEntry> questions;  // sorted by non-decreasing hardness
  FactSet facts;

  bool operator==(const Exercise&) const = default;
};

// View of the sampled questions as Question constituents.
std::vector<Constituent> question_constituents(const Exercise& ex);

// Checks the structural invariants of an assembled exercise: context order
// realizes the arrangement, provenance tags match constituent kinds, and
// question hardness is non-decreasing. Returns a reason on failure.
std::optional<std::string> exercise_invariant_violation(const Exercise& ex);

struct ConflictEdge {
  std::size_t statement_index = 0;
  std::size_t candidate_index = 0;
  double entailment = 0.0;
  double neutral = 0.0;
  double contradiction = 0.0;

  bool operator==(const ConflictEdge&) const = default;
};

struct CoherenceEdge {
  std::size_t position = 0;  // edge between sentence i and i+1
  double nsp_score = 0.0;
  double semantic_distance = 0.0;

  bool operator==(const CoherenceEdge&) const = default;
};

struct CheckReport {
  std::vector<ConflictEdge> conflict_edges;
  std::vector<CoherenceEdge> coherence_edges;
  Verdict verdict = Verdict::Accept;

  bool operator==(const CheckReport&) const = default;
};

}  // namespace wpgen
