#include <fstream>

#include "json.hpp"
#include "wpgen/templates.hpp"

namespace wpgen {

namespace {

Template statement(ExerciseType etype, TemplateRole role, std::string pattern,
                   std::vector<std::string> slots, std::vector<std::string> markers = {}) {
  Template t;
  t.pattern = std::move(pattern);
  t.required_slots = std::move(slots);
  t.etype = etype;
  t.role = role;
  t.emphasis_markers = std::move(markers);
  return t;
}

Template question(ExerciseType etype, AnswerKeyKind kind, HardnessLevel hardness,
                  std::string profile, std::string pattern, std::vector<std::string> slots) {
  Template t;
  t.pattern = std::move(pattern);
  t.required_slots = std::move(slots);
  t.etype = etype;
  t.role = TemplateRole::Question;
  t.hardness = hardness;
  t.question_kind = kind;
  t.operand_profile = std::move(profile);
  return t;
}

}  // namespace

TemplateInventory TemplateInventory::builtin() {
  using enum ExerciseType;
  using enum TemplateRole;
  using enum HardnessLevel;
  using enum AnswerKeyKind;

  TemplateInventory inv;

  // --- binomial statements ---
  inv.add(statement(Binomial, StatementProbability,
                    "{noun:Article} is {label} with a chance of {p}.", {"noun", "label", "p"}));
  inv.add(statement(Binomial, StatementProbability,
                    "The chance of {noun:article} being {label} is {p}.", {"noun", "label", "p"}));
  inv.add(statement(Binomial, StatementProbability,
                    "{With a probability of|With a chance of} {p}, {noun:article} is {label}.",
                    {"noun", "label", "p"}));

  inv.add(statement(Binomial, StatementExclusivity,
                    "{Furthermore|Moreover}, {noun:article} is either {label_a} or {label_b}.",
                    {"noun", "label_a", "label_b"}, {"either", "or"}));
  inv.add(statement(Binomial, StatementExclusivity,
                    "{noun:Article} can only be either {label_a} or {label_b}.",
                    {"noun", "label_a", "label_b"}, {"only", "either", "or"}));
  inv.add(statement(Binomial, StatementExclusivity,
                    "Each {noun} is either {label_a} or {label_b}, and nothing else.",
                    {"noun", "label_a", "label_b"}, {"either", "or"}));

  inv.add(statement(Binomial, StatementIndependence,
                    "Every {noun}'s chances of being either {label_a} or {label_b} are "
                    "independent.",
                    {"noun", "label_a", "label_b"}, {"independent", "either"}));
  inv.add(statement(Binomial, StatementIndependence,
                    "Whether one {noun} is {label_a} or {label_b} does not depend on any other "
                    "{noun}.",
                    {"noun", "label_a", "label_b"}, {"depend"}));
  inv.add(statement(Binomial, StatementIndependence,
                    "All {noun:plural} behave independently of one another in being {label_a} or "
                    "{label_b}.",
                    {"noun", "label_a", "label_b"}, {"independent"}));

  // --- normal statements ---
  inv.add(statement(Normal, StatementNormality,
                    "Experience has shown that {noun} can be assumed to follow a normal "
                    "distribution.",
                    {"noun"}, {"normal"}));
  inv.add(statement(Normal, StatementNormality,
                    "It is well established that {noun} follows a normal distribution.", {"noun"},
                    {"normal"}));
  inv.add(statement(Normal, StatementNormality,
                    "Measurements of {noun} are known to be normally distributed.", {"noun"},
                    {"normal"}));

  inv.add(statement(Normal, StatementStdDev,
                    "The standard deviation in {noun} is assumed to be approximately {sigma}.",
                    {"noun", "sigma"}, {"standard deviation"}));
  inv.add(statement(Normal, StatementStdDev,
                    "The standard deviation of {noun} amounts to {sigma}.", {"noun", "sigma"},
                    {"standard deviation"}));
  inv.add(statement(Normal, StatementStdDev,
                    "A standard deviation of {sigma} has been observed for {noun}.",
                    {"noun", "sigma"}, {"standard deviation"}));

  inv.add(statement(Normal, StatementMean,
                    "The expected value of {noun} is generally known to be {mu_approx}.",
                    {"noun", "mu_approx"}));
  inv.add(statement(Normal, StatementMean, "On average, {noun} comes to {mu_approx}.",
                    {"noun", "mu_approx"}));
  inv.add(statement(Normal, StatementMean, "The mean {noun} is {mu}.", {"noun", "mu"}));

  // --- binomial questions ---
  inv.add(question(Binomial, BinomialMean, Easy, "spec",
                   "How many of the {n} {noun:plural} are expected to be {label}?",
                   {"n", "noun", "label"}));
  inv.add(question(Binomial, BinomialMean, Easy, "spec",
                   "What is the expected number of {label} {noun:plural} among the {n}?",
                   {"n", "noun", "label"}));
  inv.add(question(Binomial, BinomialMean, Easy, "spec",
                   "On average, how many out of {n} {noun:plural} will be {label}?",
                   {"n", "noun", "label"}));

  inv.add(question(Binomial, BinomialPmf, Easy, "single",
                   "What is the chance that a single {noun:singular} is {label}?",
                   {"noun", "label"}));
  inv.add(question(Binomial, BinomialPmf, Easy, "single",
                   "How likely is one {noun:singular} to be {label}?", {"noun", "label"}));
  inv.add(question(Binomial, BinomialPmf, Easy, "single",
                   "What is the probability that a given {noun:singular} is {label}?",
                   {"noun", "label"}));

  inv.add(question(Binomial, BinomialAtMost, Medium, "spec",
                   "Calculate the chance that at most {k} out of {n} {noun:plural} are {label}.",
                   {"k", "n", "noun", "label"}));
  inv.add(question(Binomial, BinomialAtMost, Medium, "spec",
                   "What is the probability that no more than {k} of the {n} {noun:plural} are "
                   "{label}?",
                   {"k", "n", "noun", "label"}));
  inv.add(question(Binomial, BinomialAtMost, Medium, "spec",
                   "How likely is it that at most {k} of the {n} {noun:plural} are {label}?",
                   {"k", "n", "noun", "label"}));

  inv.add(question(Binomial, BinomialAtLeast, Medium, "spec",
                   "Calculate the chance that at least {k} out of {n} {noun:plural} are {label}.",
                   {"k", "n", "noun", "label"}));
  inv.add(question(Binomial, BinomialAtLeast, Medium, "spec",
                   "What is the probability that {k} or more of the {n} {noun:plural} are "
                   "{label}?",
                   {"k", "n", "noun", "label"}));
  inv.add(question(Binomial, BinomialAtLeast, Medium, "spec",
                   "How likely is it that at least {k} of the {n} {noun:plural} are {label}?",
                   {"k", "n", "noun", "label"}));

  inv.add(question(Binomial, BinomialPmf, Hard, "spec",
                   "Calculate the chance that {k} out of {n} {noun:plural} are {label}.",
                   {"k", "n", "noun", "label"}));
  inv.add(question(Binomial, BinomialPmf, Hard, "spec",
                   "What is the probability that exactly {k} of the {n} {noun:plural} are "
                   "{label}?",
                   {"k", "n", "noun", "label"}));
  inv.add(question(Binomial, BinomialPmf, Hard, "spec",
                   "Determine how likely it is that exactly {k} out of {n} {noun:plural} are "
                   "{label}.",
                   {"k", "n", "noun", "label"}));

  inv.add(question(Binomial, BinomialAtLeast, Hard, "tail",
                   "Calculate the chance that at least {k} of the {n} {noun:plural} are {label}.",
                   {"k", "n", "noun", "label"}));
  inv.add(question(Binomial, BinomialAtLeast, Hard, "tail",
                   "What is the probability that {k} or more out of {n} {noun:plural} are "
                   "{label}?",
                   {"k", "n", "noun", "label"}));
  inv.add(question(Binomial, BinomialAtLeast, Hard, "tail",
                   "How likely is it that no fewer than {k} of the {n} {noun:plural} are "
                   "{label}?",
                   {"k", "n", "noun", "label"}));

  // --- normal questions ---
  inv.add(question(Normal, NormalMean, Easy, "spec", "What is the expected value of {noun}?",
                   {"noun"}));
  inv.add(question(Normal, NormalMean, Easy, "spec",
                   "What value of {noun} is expected on average?", {"noun"}));
  inv.add(question(Normal, NormalMean, Easy, "spec", "State the expected value of the {noun}.",
                   {"noun"}));

  for (const char* profile : {"above_hi", "above_lo"}) {
    inv.add(question(Normal, NormalCdfAbove, Medium, profile,
                     "Calculate the chance that {noun} is measured at above {x}.",
                     {"noun", "x"}));
    inv.add(question(Normal, NormalCdfAbove, Medium, profile,
                     "What is the probability that {noun} exceeds {x}?", {"noun", "x"}));
    inv.add(question(Normal, NormalCdfAbove, Medium, profile,
                     "How likely is it that {noun} lies above {x}?", {"noun", "x"}));
  }

  for (const char* profile : {"between_1", "between_2"}) {
    inv.add(question(Normal, NormalCdfBetween, Hard, profile,
                     "Calculate the chance that {noun} lies between {a} and {b}.",
                     {"noun", "a", "b"}));
    inv.add(question(Normal, NormalCdfBetween, Hard, profile,
                     "What is the probability that {noun} falls between {a} and {b}?",
                     {"noun", "a", "b"}));
    inv.add(question(Normal, NormalCdfBetween, Hard, profile,
                     "How likely is it that {noun} ends up between {a} and {b}?",
                     {"noun", "a", "b"}));
  }

  return inv;
}

TemplateInventory TemplateInventory::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open template file " + path);

  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("template file: ") + e.what());
  }
  if (!doc.is_array()) throw Error(Errc::ParseError, "template file must be a JSON array");

  TemplateInventory inv;
  for (const auto& rec : doc) {
    try {
      Template t;
      t.pattern = rec.at("pattern").get<std::string>();
      t.required_slots = rec.at("slots").get<std::vector<std::string>>();
      const std::string type = rec.at("type").get<std::string>();
      if (type == "binomial") {
        t.etype = ExerciseType::Binomial;
      } else if (type == "normal") {
        t.etype = ExerciseType::Normal;
      } else {
        throw Error(Errc::ParseError, "unknown exercise type " + type);
      }
      const std::string role = rec.at("role").get<std::string>();
      const auto parsed_role = template_role_from_string(role);
      if (!parsed_role.has_value()) throw Error(Errc::ParseError, "unknown role " + role);
      t.role = *parsed_role;
      if (t.role == TemplateRole::Question) {
        const std::string h = rec.at("hardness").get<std::string>();
        if (h == "easy") t.hardness = HardnessLevel::Easy;
        else if (h == "medium") t.hardness = HardnessLevel::Medium;
        else if (h == "hard") t.hardness = HardnessLevel::Hard;
        else throw Error(Errc::ParseError, "unknown hardness " + h);
        static const std::map<std::string, AnswerKeyKind> kinds = {
            {"binomial_pmf", AnswerKeyKind::BinomialPmf},
            {"binomial_at_least", AnswerKeyKind::BinomialAtLeast},
            {"binomial_at_most", AnswerKeyKind::BinomialAtMost},
            {"binomial_mean", AnswerKeyKind::BinomialMean},
            {"normal_cdf_above", AnswerKeyKind::NormalCdfAbove},
            {"normal_cdf_between", AnswerKeyKind::NormalCdfBetween},
            {"normal_mean", AnswerKeyKind::NormalMean},
        };
        const std::string kind = rec.at("question_kind").get<std::string>();
        auto it = kinds.find(kind);
        if (it == kinds.end()) throw Error(Errc::ParseError, "unknown question kind " + kind);
        t.question_kind = it->second;
        t.operand_profile = rec.value("operand_profile", "spec");
      }
      if (rec.contains("emphasis_markers")) {
        t.emphasis_markers = rec.at("emphasis_markers").get<std::vector<std::string>>();
      }
      inv.add(std::move(t));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::ParseError, std::string("template record: ") + e.what());
    }
  }
  return inv;
}

}  // namespace wpgen
