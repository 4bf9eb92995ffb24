#include "wpgen/controller.hpp"

#include <algorithm>
#include <cmath>

#include "wpgen/solver.hpp"
#include "wpgen/text.hpp"

namespace wpgen {

void ControllerProfile::validate() const {
  if (max_prefix_ext_sents < 1 || min_statement_chunks < 1 || max_statement_chunks < 1 ||
      max_infill_sents < 1 || min_statement_chunks > max_statement_chunks) {
    throw Error(Errc::InvalidConfig, "controller profile fields must be >= 1 with min <= max");
  }
}

ControllerProfile hardness_profile(HardnessLevel h) {
  switch (h) {
    case HardnessLevel::Easy: return {1, 1, 1, 1};
    case HardnessLevel::Medium: return {2, 1, 2, 2};
    case HardnessLevel::Hard: return {3, 2, 3, 3};
  }
  return {1, 1, 1, 1};
}

Arrangement get_arrangement(const ControllerProfile& profile, std::size_t n_statements,
                            SplitRng& rng) {
  profile.validate();
  if (n_statements < 1) {
    throw Error(Errc::InvalidConfig, "arrangement needs at least one statement");
  }

  std::vector<std::string> arr;
  arr.emplace_back("P");
  const std::uint64_t prefix = rng.range(1, profile.max_prefix_ext_sents);
  arr.insert(arr.end(), prefix, "I");

  auto push_infill_run = [&] {
    const std::uint64_t run = rng.range(1, profile.max_infill_sents);
    arr.insert(arr.end(), run, "I");
  };

  std::size_t rem_chunks = profile.max_statement_chunks;
  std::size_t rem_statements = n_statements;
  while (rem_chunks > profile.min_statement_chunks && rem_statements > 0) {
    const std::uint64_t amount = rng.range(1, rem_statements);
    arr.insert(arr.end(), amount, "S");
    push_infill_run();
    --rem_chunks;
    rem_statements -= amount;
  }
  while (rem_statements > 0) {
    arr.emplace_back("S");
    push_infill_run();
    --rem_statements;
  }
  while (arr.back() == "I") arr.pop_back();

  std::size_t index = 0;
  for (auto& token : arr) {
    if (token == "S") token = std::to_string(index++);
  }
  return Arrangement::from_tokens(std::move(arr));
}

const char* to_string(Ablation a) {
  switch (a) {
    case Ablation::None: return "none";
    case Ablation::Conflict: return "conflict";
    case Ablation::CoherenceCosdistNsp: return "coherence_cosdist_nsp";
    case Ablation::ConflictCoherenceCosdist: return "conflict_coherence_cosdist";
    case Ablation::ConflictCoherenceNsp: return "conflict_coherence_nsp";
    case Ablation::Full: return "full";
  }
  return "?";
}

std::optional<Ablation> ablation_from_string(const std::string& s) {
  for (Ablation a : {Ablation::None, Ablation::Conflict, Ablation::CoherenceCosdistNsp,
                     Ablation::ConflictCoherenceCosdist, Ablation::ConflictCoherenceNsp,
                     Ablation::Full}) {
    if (s == to_string(a)) return a;
  }
  return std::nullopt;
}

CheckerToggles CheckerToggles::from_ablation(Ablation a) {
  switch (a) {
    case Ablation::None: return {false, false, false};
    case Ablation::Conflict: return {true, false, false};
    case Ablation::CoherenceCosdistNsp: return {false, true, true};
    case Ablation::ConflictCoherenceCosdist: return {true, false, true};
    case Ablation::ConflictCoherenceNsp: return {true, true, false};
    case Ablation::Full: return {true, true, true};
  }
  return {true, true, true};
}

CoherenceCriteria CheckerToggles::coherence_criteria() const {
  if (coherence_nsp && coherence_cosdist) return CoherenceCriteria::Both;
  if (coherence_nsp) return CoherenceCriteria::NspOnly;
  return CoherenceCriteria::CosdistOnly;
}

namespace {

// Text of the next constrained constituent after token position `from`.
std::string right_context_after(const Arrangement& arr,
                                const std::vector<Constituent>& statements, std::size_t from) {
  const auto& tokens = arr.tokens();
  for (std::size_t j = from + 1; j < tokens.size(); ++j) {
    if (tokens[j] != "I" && tokens[j] != "P") {
      return statements[std::stoul(tokens[j])].text;
    }
  }
  return "";
}

std::string joined_text(const std::vector<Constituent>& context) {
  std::vector<std::string> parts;
  parts.reserve(context.size());
  for (const auto& c : context) parts.push_back(c.text);
  return text::join(parts, " ");
}

Constituent make_infill(const InfillQuery& query, InfillBackend& backend, unsigned retries) {
  for (unsigned tryno = 0;; ++tryno) {
    try {
      return generate_infill(query, backend);
    } catch (const Error& e) {
      if (e.code() != Errc::DegenerateOutput || tryno >= retries) throw;
    }
  }
}

}  // namespace

Exercise assemble(const ExerciseSpec& spec, const FactSet& facts, const Arrangement& arrangement,
                  const std::vector<Constituent>& statements,
                  std::vector<QuestionPoolEntry> questions, InfillBackend& infill,
                  const InfillSettings& sampling, SplitRng& rng, unsigned degenerate_retries) {
  if (statements.size() != arrangement.statement_count()) {
    throw Error(Errc::InvalidConfig, "statement count does not match arrangement index tokens");
  }

  std::vector<Constituent> context;
  unsigned infill_index = 0;
  const auto& tokens = arrangement.tokens();
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& token = tokens[i];
    if (token == "P") {
      context.push_back({ConstituentKind::Prompt, text::trim(spec.prompt), 0,
                         Provenance::UserInput});
    } else if (token == "I") {
      InfillQuery query;
      query.left_context = joined_text(context);
      query.right_context = right_context_after(arrangement, statements, i);
      query.nucleus = sampling.nucleus;
      query.temperature = sampling.temperature;
      query.max_new_tokens = sampling.max_new_tokens;
      query.seed = rng.next();
      Constituent c = make_infill(query, infill, degenerate_retries);
      c.index = infill_index++;
      context.push_back(std::move(c));
    } else {
      context.push_back(statements[std::stoul(token)]);
    }
  }
  return Exercise{spec, arrangement, std::move(context), std::move(questions), facts};
}

namespace {

std::vector<std::string> context_texts(const Exercise& ex) {
  std::vector<std::string> out;
  out.reserve(ex.context.size());
  for (const auto& c : ex.context) out.push_back(c.text);
  return out;
}

std::vector<std::string> statement_texts(const Exercise& ex) {
  std::vector<std::string> out(ex.arrangement.statement_count());
  for (const auto& c : ex.context) {
    if (c.kind == ConstituentKind::Statement) out[c.index] = c.text;
  }
  return out;
}

std::vector<std::string> infill_texts(const Exercise& ex) {
  std::vector<std::string> out(ex.arrangement.infill_count());
  for (const auto& c : ex.context) {
    if (c.kind == ConstituentKind::Infill) out[c.index] = c.text;
  }
  return out;
}

// Context position of the infill constituent with the given candidate index.
std::size_t infill_position(const Exercise& ex, std::size_t candidate_index) {
  for (std::size_t i = 0; i < ex.context.size(); ++i) {
    if (ex.context[i].kind == ConstituentKind::Infill &&
        ex.context[i].index == candidate_index) {
      return i;
    }
  }
  throw Error(Errc::InvalidConfig, "candidate index has no infill constituent");
}

}  // namespace

GenerationResult generate_exercise(const ExerciseSpec& spec, Backends& backends,
                                   const GenerationConfig& config,
                                   const TemplateInventory& inventory, const Lexicon& lexicon) {
  config.checker.validate();
  if (config.budget.max_attempts < 1) {
    throw Error(Errc::InvalidConfig, "budget needs at least one attempt");
  }
  if (const auto violations = validate_spec(spec); !violations.empty()) {
    throw Error(violations.front().code, violations.front().message);
  }

  const ControllerProfile profile = hardness_profile(spec.hardness);
  GenerationResult result;

  for (unsigned attempt = 1; attempt <= config.budget.max_attempts; ++attempt) {
    result.attempts = attempt;

    SplitRng stmt_rng(mix_seed(spec.seed, {seed_stream::kStatements, attempt}));
    StatementBundle bundle = generate_statements(spec, inventory, lexicon, stmt_rng);

    const auto pool = build_questionpool(spec, inventory, lexicon);
    SplitRng question_rng(mix_seed(spec.seed, {seed_stream::kQuestions, attempt}));
    auto questions = sample_questions(pool, spec.hardness, question_rng);

    SplitRng arrangement_rng(mix_seed(spec.seed, {seed_stream::kArrangement, attempt}));
    const Arrangement arrangement =
        get_arrangement(profile, bundle.statements.size(), arrangement_rng);

    SplitRng infill_rng(mix_seed(spec.seed, {seed_stream::kInfill, attempt}));
    std::optional<Exercise> assembled;
    try {
      assembled = assemble(spec, bundle.facts, arrangement, bundle.statements,
                           std::move(questions), backends.infill, config.infill, infill_rng,
                           config.budget.per_constituent_retries);
    } catch (const Error& e) {
      if (e.code() == Errc::DegenerateOutput) {
        result.verdict = Verdict::RejectIncoherent;
        result.failure = e.what();
        continue;  // attempt burned, no report to record
      }
      throw;
    }
    Exercise& candidate = *assembled;

    CheckReport report;

    if (config.toggles.conflict) {
      const auto statements = statement_texts(candidate);
      std::vector<unsigned> retries_used(candidate.arrangement.infill_count(), 0);
      bool attempt_failed = false;
      while (true) {
        const auto candidates = infill_texts(candidate);
        auto conflict = check_constraint_conflicts(statements, candidates, backends.nli,
                                                   config.checker);
        report.conflict_edges = std::move(conflict.edges);
        if (conflict.pass) break;

        const std::size_t offending = report.conflict_edges.back().candidate_index;
        if (retries_used[offending] >= config.budget.per_constituent_retries) {
          attempt_failed = true;
          break;
        }
        // Replace only the offending constituent, then re-check everything.
        retries_used[offending] += 1;
        const std::size_t pos = infill_position(candidate, offending);
        const std::vector<Constituent> before(candidate.context.begin(),
                                              candidate.context.begin() +
                                                  static_cast<std::ptrdiff_t>(pos));
        InfillQuery query;
        query.left_context = joined_text(before);
        query.right_context = right_context_after(candidate.arrangement, bundle.statements, pos);
        query.nucleus = config.infill.nucleus;
        query.temperature = config.infill.temperature;
        query.max_new_tokens = config.infill.max_new_tokens;
        query.seed = mix_seed(spec.seed,
                              {seed_stream::kInfillRetry, attempt, pos, retries_used[offending]});
        try {
          Constituent replacement = generate_infill(query, backends.infill);
          replacement.index = static_cast<unsigned>(offending);
          candidate.context[pos] = std::move(replacement);
        } catch (const Error& e) {
          if (e.code() != Errc::DegenerateOutput) throw;
          attempt_failed = true;
          break;
        }
      }
      if (attempt_failed) {
        report.verdict = Verdict::RejectConflict;
        result.reports.push_back(std::move(report));
        result.verdict = Verdict::RejectConflict;
        continue;
      }
    }

    if (config.toggles.coherence_enabled()) {
      const auto sentences = context_texts(candidate);
      auto coherence =
          check_consecutive_coherence(sentences, backends.nsp, backends.embedding,
                                      config.checker, config.toggles.coherence_criteria());
      report.coherence_edges = std::move(coherence.edges);
      if (!coherence.pass) {
        report.verdict = Verdict::RejectIncoherent;
        result.reports.push_back(std::move(report));
        result.verdict = Verdict::RejectIncoherent;
        continue;
      }
    }

    if (const auto why = exercise_invariant_violation(candidate); why.has_value()) {
      throw Error(Errc::InvalidConfig, "assembled exercise violates invariants: " + *why);
    }
    if (!facts_cover_questions(candidate)) {
      throw Error(Errc::InvalidConfig, "fact set does not cover the sampled questions");
    }

    report.verdict = Verdict::Accept;
    result.reports.push_back(std::move(report));
    result.verdict = Verdict::Accept;
    result.exercise = std::move(candidate);
    return result;
  }

  if (result.failure.empty()) {
    result.failure = "budget exhausted after " + std::to_string(result.attempts) + " attempts";
  }
  return result;
}

GenerationResult generate_exercise(const ExerciseSpec& spec, Backends& backends,
                                   const GenerationConfig& config) {
  static const TemplateInventory inventory = TemplateInventory::builtin();
  static const Lexicon lexicon = Lexicon::with_defaults();
  return generate_exercise(spec, backends, config, inventory, lexicon);
}

CheckReport recheck_exercise(const Exercise& ex, Backends& backends,
                             const GenerationConfig& config) {
  CheckReport report;
  report.verdict = Verdict::Accept;
  if (config.toggles.conflict) {
    auto conflict = check_constraint_conflicts(statement_texts(ex), infill_texts(ex),
                                               backends.nli, config.checker);
    report.conflict_edges = std::move(conflict.edges);
    if (!conflict.pass) {
      report.verdict = Verdict::RejectConflict;
      return report;
    }
  }
  if (config.toggles.coherence_enabled()) {
    auto coherence =
        check_consecutive_coherence(context_texts(ex), backends.nsp, backends.embedding,
                                    config.checker, config.toggles.coherence_criteria());
    report.coherence_edges = std::move(coherence.edges);
    if (!coherence.pass) report.verdict = Verdict::RejectIncoherent;
  }
  return report;
}

bool facts_cover_questions(const Exercise& ex) {
  for (const auto& q : ex.questions) {
    try {
      const Answer a = solve(q.answer_key, ex.facts.params);
      if (!std::isfinite(a.value)) return false;
    } catch (const Error&) {
      return false;
    }
  }
  return true;
}

std::string render_exercise_text(const Exercise& ex) {
  std::vector<std::string> context;
  context.reserve(ex.context.size());
  for (const auto& c : ex.context) context.push_back(c.text);
  std::string out = text::join(context, " ");
  out += "\n\n";
  for (const auto& q : ex.questions) {
    out += q.question;
    out += "\n";
  }
  return out;
}

}  // namespace wpgen
