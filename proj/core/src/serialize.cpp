#include "wpgen/serialize.hpp"

#include <set>

#include "json.hpp"

namespace wpgen {

namespace {

using nlohmann::json;

json params_to_json(const DistributionParams& params) {
  json j;
  if (const auto* b = std::get_if<BinomialParams>(&params)) {
    j["success_probability"] = b->success_probability;
    j["trial_noun"] = b->trial_noun;
    j["outcome_labels"] = {b->outcome_labels.first, b->outcome_labels.second};
    j["trial_count_n"] = b->trial_count_n;
    j["target_count_k"] = b->target_count_k;
  } else {
    const auto& g = std::get<NormalParams>(params);
    j["mean"] = g.mean;
    j["std_dev"] = g.std_dev;
    j["quantity_noun"] = g.quantity_noun;
    j["unit"] = g.unit;
  }
  return j;
}

json spec_to_json(const ExerciseSpec& spec) {
  return {
      {"prompt", spec.prompt},
      {"type", to_string(spec.etype())},
      {"params", params_to_json(spec.params)},
      {"hardness", to_string(spec.hardness)},
      {"seed", spec.seed},
  };
}

json key_to_json(const AnswerKey& key) {
  json j;
  j["kind"] = to_string(key.kind);
  if (key.k.has_value()) j["k"] = *key.k;
  if (key.n.has_value()) j["n"] = *key.n;
  if (key.lower.has_value()) j["lower"] = *key.lower;
  if (key.upper.has_value()) j["upper"] = *key.upper;
  return j;
}

json exercise_to_json(const Exercise& ex) {
  json j;
  j["spec"] = spec_to_json(ex.spec);
  j["arrangement"] = ex.arrangement.tokens();
  json constituents = json::array();
  for (const auto& c : ex.context) {
    constituents.push_back({{"kind", to_string(c.kind)},
                            {"text", c.text},
                            {"index", c.index},
                            {"provenance", to_string(c.provenance)}});
  }
  j["constituents"] = std::move(constituents);
  json questions = json::array();
  for (const auto& q : ex.questions) {
    questions.push_back({{"text", q.question},
                         {"hardness", to_string(q.hardness)},
                         {"answer_key", key_to_json(q.answer_key)}});
  }
  j["questions"] = std::move(questions);
  json facts;
  facts["distribution"] = to_string(type_of(ex.facts.params));
  facts["params"] = params_to_json(ex.facts.params);
  facts["independent_trials"] = ex.facts.independent_trials;
  facts["exclusive_outcomes"] = ex.facts.exclusive_outcomes;
  facts["normality_assumed"] = ex.facts.normality_assumed;
  j["facts"] = std::move(facts);
  return j;
}

json report_to_json(const CheckReport& report) {
  json j;
  j["verdict"] = to_string(report.verdict);
  json conflict = json::array();
  for (const auto& e : report.conflict_edges) {
    conflict.push_back({{"statement_index", e.statement_index},
                        {"candidate_index", e.candidate_index},
                        {"entailment", e.entailment},
                        {"neutral", e.neutral},
                        {"contradiction", e.contradiction}});
  }
  j["conflict_edges"] = std::move(conflict);
  json coherence = json::array();
  for (const auto& e : report.coherence_edges) {
    coherence.push_back({{"position", e.position},
                         {"nsp_score", e.nsp_score},
                         {"semantic_distance", e.semantic_distance}});
  }
  j["coherence_edges"] = std::move(coherence);
  return j;
}

[[noreturn]] void malformed(const std::string& why) {
  throw Error(Errc::MalformedDocument, why);
}

void require_keys(const json& j, const std::set<std::string>& required,
                  const std::set<std::string>& optional, const std::string& where) {
  if (!j.is_object()) malformed(where + " must be an object");
  for (const auto& key : required) {
    if (!j.contains(key)) malformed(where + " is missing required field '" + key + "'");
  }
  for (const auto& [key, value] : j.items()) {
    if (!required.contains(key) && !optional.contains(key)) {
      malformed(where + " has unknown field '" + key + "'");
    }
  }
}

HardnessLevel hardness_from_json(const json& j, const std::string& where) {
  const std::string s = j.get<std::string>();
  if (s == "easy") return HardnessLevel::Easy;
  if (s == "medium") return HardnessLevel::Medium;
  if (s == "hard") return HardnessLevel::Hard;
  malformed(where + ": unknown hardness '" + s + "'");
}

DistributionParams params_from_json(const json& j, const std::string& type) {
  if (type == "binomial") {
    require_keys(j,
                 {"success_probability", "trial_noun", "outcome_labels", "trial_count_n",
                  "target_count_k"},
                 {}, "spec.params");
    BinomialParams b;
    b.success_probability = j.at("success_probability").get<double>();
    b.trial_noun = j.at("trial_noun").get<std::string>();
    const auto labels = j.at("outcome_labels");
    if (!labels.is_array() || labels.size() != 2) malformed("outcome_labels must hold two labels");
    b.outcome_labels = {labels[0].get<std::string>(), labels[1].get<std::string>()};
    b.trial_count_n = j.at("trial_count_n").get<unsigned>();
    b.target_count_k = j.at("target_count_k").get<unsigned>();
    return b;
  }
  if (type == "normal") {
    require_keys(j, {"mean", "std_dev", "quantity_noun", "unit"}, {}, "spec.params");
    NormalParams g;
    g.mean = j.at("mean").get<double>();
    g.std_dev = j.at("std_dev").get<double>();
    g.quantity_noun = j.at("quantity_noun").get<std::string>();
    g.unit = j.at("unit").get<std::string>();
    return g;
  }
  malformed("unknown exercise type '" + type + "'");
}

ExerciseSpec spec_from_json(const json& j) {
  require_keys(j, {"prompt", "type", "params", "hardness", "seed"}, {}, "spec");
  ExerciseSpec spec;
  spec.prompt = j.at("prompt").get<std::string>();
  spec.params = params_from_json(j.at("params"), j.at("type").get<std::string>());
  spec.hardness = hardness_from_json(j.at("hardness"), "spec");
  spec.seed = j.at("seed").get<std::uint64_t>();
  return spec;
}

AnswerKey key_from_json(const json& j) {
  require_keys(j, {"kind"}, {"k", "n", "lower", "upper"}, "answer_key");
  AnswerKey key;
  const std::string kind = j.at("kind").get<std::string>();
  bool found = false;
  for (AnswerKeyKind k :
       {AnswerKeyKind::BinomialPmf, AnswerKeyKind::BinomialAtLeast, AnswerKeyKind::BinomialAtMost,
        AnswerKeyKind::BinomialMean, AnswerKeyKind::NormalCdfAbove,
        AnswerKeyKind::NormalCdfBetween, AnswerKeyKind::NormalMean}) {
    if (kind == to_string(k)) {
      key.kind = k;
      found = true;
      break;
    }
  }
  if (!found) malformed("unknown answer key kind '" + kind + "'");
  if (j.contains("k")) key.k = j.at("k").get<double>();
  if (j.contains("n")) key.n = j.at("n").get<double>();
  if (j.contains("lower")) key.lower = j.at("lower").get<double>();
  if (j.contains("upper")) key.upper = j.at("upper").get<double>();
  return key;
}

Exercise exercise_from_json(const json& j) {
  require_keys(j, {"spec", "arrangement", "constituents", "questions", "facts"}, {}, "document");

  const ExerciseSpec spec = spec_from_json(j.at("spec"));

  if (!j.at("arrangement").is_array()) malformed("arrangement must be a token list");
  std::vector<std::string> tokens;
  for (const auto& t : j.at("arrangement")) tokens.push_back(t.get<std::string>());
  if (!Arrangement::grammar_ok(tokens)) malformed("arrangement breaks the token grammar");

  std::vector<Constituent> context;
  for (const auto& c : j.at("constituents")) {
    require_keys(c, {"kind", "text", "index", "provenance"}, {}, "constituent");
    Constituent out;
    const std::string kind = c.at("kind").get<std::string>();
    if (kind == "prompt") out.kind = ConstituentKind::Prompt;
    else if (kind == "statement") out.kind = ConstituentKind::Statement;
    else if (kind == "infill") out.kind = ConstituentKind::Infill;
    else if (kind == "question") out.kind = ConstituentKind::Question;
    else malformed("unknown constituent kind '" + kind + "'");
    out.text = c.at("text").get<std::string>();
    out.index = c.at("index").get<unsigned>();
    const std::string prov = c.at("provenance").get<std::string>();
    if (prov == "user_input") out.provenance = Provenance::UserInput;
    else if (prov == "constrained_template") out.provenance = Provenance::ConstrainedTemplate;
    else if (prov == "unconstrained_nlm") out.provenance = Provenance::UnconstrainedNLM;
    else malformed("unknown provenance '" + prov + "'");
    context.push_back(std::move(out));
  }

  std::vector<QuestionPoolEntry> questions;
  for (const auto& q : j.at("questions")) {
    require_keys(q, {"text", "hardness", "answer_key"}, {}, "question");
    questions.push_back({q.at("text").get<std::string>(),
                         hardness_from_json(q.at("hardness"), "question"),
                         key_from_json(q.at("answer_key"))});
  }

  const json& f = j.at("facts");
  require_keys(f,
               {"distribution", "params", "independent_trials", "exclusive_outcomes",
                "normality_assumed"},
               {}, "facts");
  FactSet facts;
  facts.params = params_from_json(f.at("params"), f.at("distribution").get<std::string>());
  facts.independent_trials = f.at("independent_trials").get<bool>();
  facts.exclusive_outcomes = f.at("exclusive_outcomes").get<bool>();
  facts.normality_assumed = f.at("normality_assumed").get<bool>();

  return Exercise{spec, Arrangement::from_tokens(std::move(tokens)), std::move(context),
                  std::move(questions), std::move(facts)};
}

}  // namespace

std::string serialize_exercise(const Exercise& ex) { return exercise_to_json(ex).dump(2); }

Exercise deserialize_exercise(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    malformed(std::string("not valid JSON: ") + e.what());
  }
  try {
    return exercise_from_json(doc);
  } catch (const Error&) {
    throw;
  } catch (const json::exception& e) {
    malformed(std::string("type mismatch: ") + e.what());
  }
}

std::string serialize_result(const GenerationResult& result, const ExerciseSpec& spec) {
  json j;
  j["verdict"] = to_string(result.verdict);
  j["attempts"] = result.attempts;
  j["spec"] = spec_to_json(spec);
  if (result.exercise.has_value()) {
    j["exercise"] = exercise_to_json(*result.exercise);
  } else {
    j["exercise"] = nullptr;
    j["failure"] = result.failure;
  }
  json reports = json::array();
  for (const auto& r : result.reports) reports.push_back(report_to_json(r));
  j["reports"] = std::move(reports);
  return j.dump(2);
}

}  // namespace wpgen
