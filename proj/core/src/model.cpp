#include "wpgen/model.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "wpgen/text.hpp"

namespace wpgen {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::ProbabilityOutOfRange: return "ProbabilityOutOfRange";
    case Errc::NonPositiveStdDev: return "NonPositiveStdDev";
    case Errc::KExceedsN: return "KExceedsN";
    case Errc::NonPositiveTrialCount: return "NonPositiveTrialCount";
    case Errc::LabelsNotDistinct: return "LabelsNotDistinct";
    case Errc::EmptyPrompt: return "EmptyPrompt";
    case Errc::PromptNotSentence: return "PromptNotSentence";
    case Errc::MalformedDocument: return "MalformedDocument";
    case Errc::ParseError: return "ParseError";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::MissingTemplate: return "MissingTemplate";
    case Errc::UnboundSlot: return "UnboundSlot";
    case Errc::InsufficientPool: return "InsufficientPool";
    case Errc::BackendUnavailable: return "BackendUnavailable";
    case Errc::DegenerateOutput: return "DegenerateOutput";
    case Errc::ScorerFailure: return "ScorerFailure";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::KOutOfRange: return "KOutOfRange";
    case Errc::NonPositiveSigma: return "NonPositiveSigma";
    case Errc::UnresolvableKey: return "UnresolvableKey";
    case Errc::EmptyCounts: return "EmptyCounts";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::DuplicateRating: return "DuplicateRating";
    case Errc::RatingMismatch: return "RatingMismatch";
    case Errc::BudgetExhausted: return "BudgetExhausted";
    case Errc::Aborted: return "Aborted";
  }
  return "UnknownError";
}

const char* to_string(ExerciseType t) {
  return t == ExerciseType::Binomial ? "binomial" : "normal";
}

const char* to_string(HardnessLevel h) {
  switch (h) {
    case HardnessLevel::Easy: return "easy";
    case HardnessLevel::Medium: return "medium";
    case HardnessLevel::Hard: return "hard";
  }
  return "?";
}

const char* to_string(ConstituentKind k) {
  switch (k) {
    case ConstituentKind::Prompt: return "prompt";
    case ConstituentKind::Statement: return "statement";
    case ConstituentKind::Infill: return "infill";
    case ConstituentKind::Question: return "question";
  }
  return "?";
}

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::UserInput: return "user_input";
    case Provenance::ConstrainedTemplate: return "constrained_template";
    case Provenance::UnconstrainedNLM: return "unconstrained_nlm";
  }
  return "?";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Accept: return "accept";
    case Verdict::RejectConflict: return "reject_conflict";
    case Verdict::RejectIncoherent: return "reject_incoherent";
  }
  return "?";
}

const char* to_string(AnswerKeyKind k) {
  switch (k) {
    case AnswerKeyKind::BinomialPmf: return "binomial_pmf";
    case AnswerKeyKind::BinomialAtLeast: return "binomial_at_least";
    case AnswerKeyKind::BinomialAtMost: return "binomial_at_most";
    case AnswerKeyKind::BinomialMean: return "binomial_mean";
    case AnswerKeyKind::NormalCdfAbove: return "normal_cdf_above";
    case AnswerKeyKind::NormalCdfBetween: return "normal_cdf_between";
    case AnswerKeyKind::NormalMean: return "normal_mean";
  }
  return "?";
}

std::vector<SpecViolation> validate_spec(const ExerciseSpec& spec) {
  std::vector<SpecViolation> out;
  const std::string prompt = text::trim(spec.prompt);
  if (prompt.empty()) {
    out.push_back({Errc::EmptyPrompt, "prompt must contain at least one sentence"});
  } else if (!text::ends_like_sentence(prompt)) {
    out.push_back({Errc::PromptNotSentence, "prompt must end in sentence-final punctuation"});
  }

  if (const auto* b = std::get_if<BinomialParams>(&spec.params)) {
    if (!(b->success_probability > 0.0 && b->success_probability < 1.0)) {
      out.push_back({Errc::ProbabilityOutOfRange,
                     "success probability must lie strictly between 0 and 1"});
    }
    if (b->trial_count_n == 0) {
      out.push_back({Errc::NonPositiveTrialCount, "trial count n must be at least 1"});
    }
    if (b->target_count_k > b->trial_count_n) {
      out.push_back({Errc::KExceedsN, "target count k must not exceed trial count n"});
    }
    if (b->outcome_labels.first == b->outcome_labels.second) {
      out.push_back({Errc::LabelsNotDistinct, "outcome labels must differ"});
    }
  } else {
    const auto& n = std::get<NormalParams>(spec.params);
    if (!(n.std_dev > 0.0)) {
      out.push_back({Errc::NonPositiveStdDev, "standard deviation must be positive"});
    }
  }
  return out;
}

namespace {

bool is_index_token(const std::string& t) {
  if (t.empty()) return false;
  return std::all_of(t.begin(), t.end(),
                     [](unsigned char c) { return std::isdigit(c) != 0; });
}

}  // namespace

bool Arrangement::grammar_ok(const std::vector<std::string>& tokens, std::string* why) {
  auto fail = [&](const char* reason) {
    if (why) *why = reason;
    return false;
  };
  if (tokens.empty()) return fail("empty token sequence");
  if (tokens.front() != "P") return fail("first token must be P");
  if (tokens.size() < 2 || tokens[1] != "I") return fail("P must be followed by at least one I");
  if (tokens.back() == "I") return fail("trailing I is not allowed");

  std::multiset<std::size_t> indices;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& t = tokens[i];
    if (t == "P") {
      if (i != 0) return fail("P may only appear first");
    } else if (t == "I") {
      // connector placeholder
    } else if (is_index_token(t)) {
      indices.insert(static_cast<std::size_t>(std::stoull(t)));
    } else {
      return fail("unknown token");
    }
  }
  if (indices.empty()) return fail("at least one statement index required");
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices.count(i) != 1) return fail("statement indices must cover 0..n-1 exactly once");
  }
  return true;
}

Arrangement Arrangement::from_tokens(std::vector<std::string> tokens) {
  std::string why;
  if (!grammar_ok(tokens, &why)) {
    throw Error(Errc::MalformedDocument, "invalid arrangement: " + why);
  }
  return Arrangement(std::move(tokens));
}

std::size_t Arrangement::statement_count() const {
  std::size_t n = 0;
  for (const auto& t : tokens_) {
    if (t != "P" && t != "I") ++n;
  }
  return n;
}

std::size_t Arrangement::infill_count() const {
  std::size_t n = 0;
  for (const auto& t : tokens_) {
    if (t == "I") ++n;
  }
  return n;
}

std::string Arrangement::str() const { return text::join(tokens_, " "); }

std::vector<Constituent> question_constituents(const Exercise& ex) {
  std::vector<Constituent> out;
  out.reserve(ex.questions.size());
  for (std::size_t i = 0; i < ex.questions.size(); ++i) {
    out.push_back({ConstituentKind::Question, ex.questions[i].question,
                   static_cast<unsigned>(i), Provenance::ConstrainedTemplate});
  }
  return out;
}

std::optional<std::string> exercise_invariant_violation(const Exercise& ex) {
  const auto& tokens = ex.arrangement.tokens();
  if (ex.context.size() != tokens.size()) {
    return "context length does not match arrangement length";
  }
  unsigned infill_seen = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Constituent& c = ex.context[i];
    if (tokens[i] == "P") {
      if (c.kind != ConstituentKind::Prompt || c.provenance != Provenance::UserInput) {
        return "P token not realized by a user-input prompt constituent";
      }
    } else if (tokens[i] == "I") {
      if (c.kind != ConstituentKind::Infill || c.provenance != Provenance::UnconstrainedNLM) {
        return "I token not realized by an NLM infill constituent";
      }
      if (c.index != infill_seen) return "infill constituents out of order";
      ++infill_seen;
    } else {
      if (c.kind != ConstituentKind::Statement ||
          c.provenance != Provenance::ConstrainedTemplate) {
        return "index token not realized by a template statement constituent";
      }
      if (std::to_string(c.index) != tokens[i]) {
        return "statement constituent index does not match arrangement token";
      }
    }
  }
  for (std::size_t i = 1; i < ex.questions.size(); ++i) {
    if (ex.questions[i].hardness < ex.questions[i - 1].hardness) {
      return "questions not ordered by non-decreasing hardness";
    }
  }
  return std::nullopt;
}

}  // namespace wpgen
