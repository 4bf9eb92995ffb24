#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wpgen/model.hpp"
#include "wpgen/rng.hpp"

namespace wpgen {

enum class TemplateRole {
  // statements, binomial
  StatementProbability,
  StatementExclusivity,
  StatementIndependence,
  // statements, normal
  StatementNormality,
  StatementStdDev,
  StatementMean,
  // questions (role refined by question_kind + hardness)
  Question,
};

const char* to_string(TemplateRole r);
std::optional<TemplateRole> template_role_from_string(const std::string& s);

// Pattern syntax:
//   {slot}            substitute the bound value (lexemes inflect by count)
//   {slot:plural}     plural form of a lexeme slot
//   {slot:article}    indefinite article + singular ("a traffic light")
//   {slot:Article}    same, capitalized
//   {a|b|c}           uniform random alternative (consumes rng)
struct Template {
  std::string pattern;
  std::vector<std::string> required_slots;
  ExerciseType etype = ExerciseType::Binomial;
  TemplateRole role = TemplateRole::StatementProbability;
  std::optional<HardnessLevel> hardness;        // questions only
  std::optional<AnswerKeyKind> question_kind;   // questions only
  std::string operand_profile = "spec";         // answer-key derivation rule
  std::vector<std::string> emphasis_markers;    // keywords the pattern must carry

  // Throws InvalidConfig when a pattern slot is missing from required_slots,
  // the pattern is not a single sentence, or an emphasis marker is absent.
  void validate() const;
};

struct LexiconEntry {
  std::string singular;
  std::string plural;   // empty means "+s" fallback
  std::string article;  // empty means a/an heuristic
};

class Lexicon {
 public:
  static Lexicon with_defaults();

  void add(const std::string& lexeme, LexiconEntry entry);
  std::string singular(const std::string& lexeme) const;
  std::string plural(const std::string& lexeme) const;
  std::string article(const std::string& lexeme) const;

 private:
  std::map<std::string, LexiconEntry> entries_;
};

struct SlotValue {
  std::string value;
  bool is_lexeme = false;
  double count = 1.0;  // drives number agreement for lexeme slots

  static SlotValue literal(std::string v) { return {std::move(v), false, 1.0}; }
  static SlotValue lexeme(std::string v, double count = 1.0) { return {std::move(v), true, count}; }
};

using SlotMap = std::map<std::string, SlotValue>;

// Realizes one template to a single sentence. Throws UnboundSlot when the
// pattern references a slot that is not in the map.
std::string realize_template(const Template& tpl, const SlotMap& slots, const Lexicon& lexicon,
                             SplitRng& rng);

class TemplateInventory {
 public:
  // The inventory shipped with the library: three or more variants per
  // statement role and per question kind, for both exercise types.
  static TemplateInventory builtin();

  // Loads a JSON inventory file (see README for the record format), so new
  // templates can be added without code changes. Throws ParseError.
  static TemplateInventory load_file(const std::string& path);

  void add(Template tpl);
  const std::vector<Template>& all() const { return templates_; }

  std::vector<const Template*> statements(ExerciseType etype, TemplateRole role) const;
  std::vector<const Template*> questions(ExerciseType etype) const;

 private:
  std::vector<Template> templates_;
};

struct StatementBundle {
  std::vector<Constituent> statements;  // uniformly permuted; index = position
  FactSet facts;
};

// Exactly three statements per exercise type: probability / exclusivity /
// independence for binomial, normality / standard deviation / expected value
// for normal. Template variants and statement order are drawn from rng.
// Throws MissingTemplate when the inventory lacks coverage.
StatementBundle generate_statements(const ExerciseSpec& spec, const TemplateInventory& inventory,
                                    const Lexicon& lexicon, SplitRng& rng);

StatementBundle generate_statements(const ExerciseSpec& spec, SplitRng& rng);

// Enumerates every question template variant applicable to the spec into
// (question, hardness, answer key) entries. Deterministic given the spec.
// Throws MissingTemplate when a hardness level ends up with fewer than two
// entries.
std::vector<QuestionPoolEntry> build_questionpool(const ExerciseSpec& spec,
                                                  const TemplateInventory& inventory,
                                                  const Lexicon& lexicon);

std::vector<QuestionPoolEntry> build_questionpool(const ExerciseSpec& spec);

// Numbers of questions drawn per exercise hardness, and the hardest level
// allowed in the draw. Hard additionally guarantees at least one Hard
// question.
struct QuestionProfile {
  std::size_t count = 1;
  HardnessLevel max_level = HardnessLevel::Medium;
  bool require_hard = false;
};

QuestionProfile question_profile(HardnessLevel h);

// Samples without replacement (and without repeating an answer key), sorted
// by non-decreasing hardness. Throws InsufficientPool.
std::vector<QuestionPoolEntry> sample_questions(const std::vector<QuestionPoolEntry>& pool,
                                                HardnessLevel hardness, SplitRng& rng);

}  // namespace wpgen
