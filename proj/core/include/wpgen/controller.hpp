#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wpgen/checkers.hpp"
#include "wpgen/infill.hpp"
#include "wpgen/model.hpp"
#include "wpgen/rng.hpp"
#include "wpgen/templates.hpp"

namespace wpgen {

// Hyperparameters of the arrangement sampler, driven by exercise hardness.
struct ControllerProfile {
  unsigned max_prefix_ext_sents = 1;
  unsigned min_statement_chunks = 1;
  unsigned max_statement_chunks = 1;
  unsigned max_infill_sents = 1;

  void validate() const;  // all >= 1, min <= max chunks
};

// Easy -> (1, 1/1, 1), Medium -> (2, 1/2, 2), Hard -> (3, 2/3, 3).
ControllerProfile hardness_profile(HardnessLevel h);

// Draws a constituent arrangement: prompt, a random run of leading
// connectors, statement chunks interleaved with connector runs, trailing
// connectors stripped, statement placeholders numbered left to right.
Arrangement get_arrangement(const ControllerProfile& profile, std::size_t n_statements,
                            SplitRng& rng);

struct GenerationBudget {
  unsigned max_attempts = 50;
  unsigned per_constituent_retries = 3;
};

enum class Ablation {
  None,
  Conflict,
  CoherenceCosdistNsp,
  ConflictCoherenceCosdist,
  ConflictCoherenceNsp,
  Full,
};

const char* to_string(Ablation a);
std::optional<Ablation> ablation_from_string(const std::string& s);

struct CheckerToggles {
  bool conflict = true;
  bool coherence_nsp = true;
  bool coherence_cosdist = true;

  static CheckerToggles from_ablation(Ablation a);
  bool coherence_enabled() const { return coherence_nsp || coherence_cosdist; }
  CoherenceCriteria coherence_criteria() const;
};

struct Backends {
  InfillBackend& infill;
  NliScorer& nli;
  NspScorer& nsp;
  EmbeddingScorer& embedding;
};

struct GenerationConfig {
  CheckerConfig checker{};
  CheckerToggles toggles{};
  GenerationBudget budget{};
  InfillSettings infill{};
};

// Walks the arrangement left to right: P becomes the prompt constituent,
// index i becomes statements[i], and each I is filled by the backend with
// left context = everything realized so far and right context = the next
// constrained constituent (empty at the tail). Questions are appended after
// the context. Infill seeds are drawn from rng; a degenerate infill is
// retried up to degenerate_retries times before the error propagates.
Exercise assemble(const ExerciseSpec& spec, const FactSet& facts, const Arrangement& arrangement,
                  const std::vector<Constituent>& statements,
                  std::vector<QuestionPoolEntry> questions, InfillBackend& infill,
                  const InfillSettings& sampling, SplitRng& rng,
                  unsigned degenerate_retries = 0);

struct GenerationResult {
  Verdict verdict = Verdict::Accept;  // verdict of the last attempt
  unsigned attempts = 0;
  std::optional<Exercise> exercise;   // set iff accepted
  std::vector<CheckReport> reports;   // one per completed attempt
  std::string failure;                // set when the budget ran out

  bool accepted() const { return exercise.has_value(); }
};

// Full strategy per attempt: constrained generation, question sampling,
// arrangement, assembly, conflict check, coherence check. A conflicting
// infill is regenerated up to budget.per_constituent_retries times per
// position (full conflict re-check after each replacement); a coherence
// failure rejects the attempt. After budget.max_attempts failed attempts the
// result carries every report and an empty exercise.
GenerationResult generate_exercise(const ExerciseSpec& spec, Backends& backends,
                                   const GenerationConfig& config,
                                   const TemplateInventory& inventory, const Lexicon& lexicon);

GenerationResult generate_exercise(const ExerciseSpec& spec, Backends& backends,
                                   const GenerationConfig& config = {});

// Re-runs both checkers on a finished exercise with the same configuration;
// used to audit that accepted exercises still pass.
CheckReport recheck_exercise(const Exercise& ex, Backends& backends,
                             const GenerationConfig& config);

// True iff the fact set alone resolves every question's answer key to a
// finite value.
bool facts_cover_questions(const Exercise& ex);

// Context paragraph, blank line, one question per line.
std::string render_exercise_text(const Exercise& ex);

}  // namespace wpgen
