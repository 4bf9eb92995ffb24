#include "wpgen/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <set>

#include "CLI11.hpp"
#include "json.hpp"
#include "wpgen/checkers.hpp"
#include "wpgen/controller.hpp"
#include "wpgen/eval.hpp"
#include "wpgen/http_backends.hpp"
#include "wpgen/infill.hpp"
#include "wpgen/serialize.hpp"
#include "wpgen/text.hpp"

namespace wpgen::cli {

namespace {

using nlohmann::json;

std::optional<std::string> env_value(const char* name) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

double parse_probability(const std::string& raw) {
  std::string s = text::trim(raw);
  bool percent = false;
  if (!s.empty() && s.back() == '%') {
    percent = true;
    s.pop_back();
  }
  std::size_t used = 0;
  const double value = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("trailing characters");
  return percent ? value / 100.0 : value;
}

class DialogIo {
 public:
  DialogIo(std::istream& in, std::ostream& out) : in_(in), out_(out) {}

  std::string ask(const std::string& prompt) {
    out_ << prompt << " " << std::flush;
    std::string line;
    if (!std::getline(in_, line)) {
      throw Error(Errc::Aborted, "input ended during the dialog");
    }
    return text::trim(line);
  }

  void complain(Errc code, const std::string& detail) {
    out_ << "Invalid value (" << errc_name(code) << "): " << detail << "\n";
  }

 private:
  std::istream& in_;
  std::ostream& out_;
};

}  // namespace

bool SpecDraft::complete() const {
  if (!prompt.has_value() || !etype.has_value() || !hardness.has_value()) return false;
  if (*etype == ExerciseType::Binomial) {
    return noun && success_label && failure_label && probability && trials_n && target_k;
  }
  return noun && unit && mean && std_dev;
}

ExerciseSpec SpecDraft::resolve(std::uint64_t seed) const {
  if (!complete()) throw Error(Errc::InvalidConfig, "exercise specification is incomplete");
  ExerciseSpec spec;
  spec.prompt = text::trim(*prompt);
  spec.hardness = *hardness;
  spec.seed = seed;
  if (*etype == ExerciseType::Binomial) {
    BinomialParams b;
    b.success_probability = *probability;
    b.trial_noun = *noun;
    b.outcome_labels = {*success_label, *failure_label};
    b.trial_count_n = *trials_n;
    b.target_count_k = *target_k;
    spec.params = b;
  } else {
    NormalParams g;
    g.mean = *mean;
    g.std_dev = *std_dev;
    g.quantity_noun = *noun;
    g.unit = *unit;
    spec.params = g;
  }
  return spec;
}

ExerciseSpec guided_dialog(std::istream& in, std::ostream& out, SpecDraft draft,
                           std::uint64_t seed) {
  DialogIo io(in, out);

  while (!draft.prompt.has_value()) {
    const std::string p = io.ask("Context prompt (sets the scene, ends with punctuation):");
    if (text::trim(p).empty()) {
      io.complain(Errc::EmptyPrompt, "the prompt must contain at least one sentence");
    } else if (!text::ends_like_sentence(p)) {
      io.complain(Errc::PromptNotSentence, "the prompt must end in '.', '!' or '?'");
    } else {
      draft.prompt = p;
    }
  }

  while (!draft.etype.has_value()) {
    const std::string t = text::to_lower(io.ask("Exercise type [binomial/normal]:"));
    if (t == "binomial" || t == "b") draft.etype = ExerciseType::Binomial;
    else if (t == "normal" || t == "n") draft.etype = ExerciseType::Normal;
    else io.complain(Errc::InvalidConfig, "choose 'binomial' or 'normal'");
  }

  auto ask_number = [&](const std::string& prompt, auto parse) {
    while (true) {
      const std::string raw = io.ask(prompt);
      try {
        return parse(raw);
      } catch (const std::exception&) {
        io.complain(Errc::ParseError, "not a number: '" + raw + "'");
      }
    }
  };

  if (*draft.etype == ExerciseType::Binomial) {
    if (!draft.noun) draft.noun = io.ask("Trial noun (e.g. 'traffic light'):");
    if (!draft.success_label) draft.success_label = io.ask("Success outcome label:");
    while (!draft.failure_label.has_value()) {
      const std::string label = io.ask("Failure outcome label:");
      if (label == *draft.success_label) {
        io.complain(Errc::LabelsNotDistinct, "outcome labels must differ");
      } else {
        draft.failure_label = label;
      }
    }
    while (!draft.probability.has_value()) {
      const double p = ask_number("Success probability (e.g. 0.55 or 55%):", parse_probability);
      if (p > 0.0 && p < 1.0) {
        draft.probability = p;
      } else {
        io.complain(Errc::ProbabilityOutOfRange,
                    "the probability must lie strictly between 0 and 1");
      }
    }
    while (!draft.trials_n.has_value()) {
      const long n =
          ask_number("Number of trials n:", [](const std::string& s) { return std::stol(s); });
      if (n >= 1) {
        draft.trials_n = static_cast<unsigned>(n);
      } else {
        io.complain(Errc::NonPositiveTrialCount, "n must be at least 1");
      }
    }
    while (!draft.target_k.has_value()) {
      const long k =
          ask_number("Target count k:", [](const std::string& s) { return std::stol(s); });
      if (k < 0) {
        io.complain(Errc::KOutOfRange, "k must be non-negative");
      } else if (static_cast<unsigned>(k) > *draft.trials_n) {
        io.complain(Errc::KExceedsN, "k must not exceed n");
      } else {
        draft.target_k = static_cast<unsigned>(k);
      }
    }
  } else {
    if (!draft.noun) draft.noun = io.ask("Quantity noun (e.g. 'water consumption'):");
    if (!draft.unit) draft.unit = io.ask("Unit (e.g. 'ml'):");
    if (!draft.mean) {
      draft.mean = ask_number("Mean:", [](const std::string& s) { return std::stod(s); });
    }
    while (!draft.std_dev.has_value()) {
      const double sd =
          ask_number("Standard deviation:", [](const std::string& s) { return std::stod(s); });
      if (sd > 0.0) {
        draft.std_dev = sd;
      } else {
        io.complain(Errc::NonPositiveStdDev, "the standard deviation must be positive");
      }
    }
  }

  while (!draft.hardness.has_value()) {
    const std::string h = text::to_lower(io.ask("Hardness [easy/medium/hard]:"));
    if (h == "easy") draft.hardness = HardnessLevel::Easy;
    else if (h == "medium") draft.hardness = HardnessLevel::Medium;
    else if (h == "hard") draft.hardness = HardnessLevel::Hard;
    else io.complain(Errc::InvalidConfig, "choose easy, medium or hard");
  }

  ExerciseSpec spec = draft.resolve(seed);
  if (const auto violations = validate_spec(spec); !violations.empty()) {
    // The field-level loops above should have caught everything already.
    throw Error(violations.front().code, violations.front().message);
  }
  return spec;
}

namespace {

// ---------------------------------------------------------------------------
// backend wiring
// ---------------------------------------------------------------------------

struct BackendSet {
  std::unique_ptr<InfillBackend> infill;
  std::unique_ptr<NliScorer> nli;
  std::unique_ptr<NspScorer> nsp;
  std::unique_ptr<EmbeddingScorer> embedding;

  Backends refs() { return {*infill, *nli, *nsp, *embedding}; }
};

struct EndpointFlags {
  std::string infill;
  std::string nli;
  std::string nsp;
  std::string embed;
};

BackendSet make_backends(const std::string& which, const EndpointFlags& flags) {
  BackendSet set;
  if (which == "stub") {
    // Marker oracles keyed to the stub pool, so the checking funnel stays
    // observable without any model download.
    set.infill = std::make_unique<StubInfillBackend>();
    set.nli = std::make_unique<oracle::MarkerNli>(StubInfillBackend::kConflictMarker);
    set.nsp = std::make_unique<oracle::MarkerNsp>(StubInfillBackend::kIncoherenceMarker);
    set.embedding = std::make_unique<oracle::TableEmbedding>();
    return set;
  }
  if (which != "neural") {
    throw Error(Errc::InvalidConfig, "unknown backend '" + which + "'");
  }
  auto pick = [](const std::string& flag, const char* env, const char* what) {
    if (!flag.empty()) return flag;
    if (auto v = env_value(env)) return *v;
    throw Error(Errc::BackendUnavailable,
                std::string(what) + " endpoint not set (flag or " + env + ")");
  };
  set.infill =
      std::make_unique<HttpInfillBackend>(pick(flags.infill, "WPGEN_INFILL_ENDPOINT", "infill"));
  set.nli = std::make_unique<HttpNliScorer>(pick(flags.nli, "WPGEN_NLI_ENDPOINT", "NLI"));
  set.nsp = std::make_unique<HttpNspScorer>(pick(flags.nsp, "WPGEN_NSP_ENDPOINT", "NSP"));
  set.embedding = std::make_unique<HttpEmbeddingScorer>(
      pick(flags.embed, "WPGEN_EMBED_ENDPOINT", "embedding"));
  return set;
}

// ---------------------------------------------------------------------------
// config files
// ---------------------------------------------------------------------------

json load_json_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, std::string(what) + ": cannot open " + path);
  try {
    json doc;
    in >> doc;
    return doc;
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, std::string(what) + ": " + e.what());
  }
}

HardnessLevel hardness_from_name(const std::string& s) {
  if (s == "easy") return HardnessLevel::Easy;
  if (s == "medium") return HardnessLevel::Medium;
  if (s == "hard") return HardnessLevel::Hard;
  throw Error(Errc::ParseError, "unknown hardness '" + s + "'");
}

RunConfig run_config_from_json(const json& j) {
  RunConfig config;
  try {
    if (j.contains("hardness")) {
      config.generation_hardness = hardness_from_name(j.at("hardness").get<std::string>());
    }
    if (j.contains("nucleus")) config.generation_nucleus = j.at("nucleus").get<double>();
    if (j.contains("conflict_condition")) {
      const auto& cc = j.at("conflict_condition");
      if (!cc.is_array() || cc.size() != 2) {
        throw Error(Errc::ParseError,
                    "conflict_condition must be [contradiction_min, entailment_max]");
      }
      config.conflict_condition = {cc[0].get<double>(), cc[1].get<double>()};
    }
    if (j.contains("coherence_nsp")) config.coherence_nsp = j.at("coherence_nsp").get<double>();
    if (j.contains("coherence_cosdist")) {
      config.coherence_cosdist = j.at("coherence_cosdist").get<double>();
    }
    if (j.contains("ablation")) {
      const std::string name = j.at("ablation").get<std::string>();
      const auto a = ablation_from_string(name);
      if (!a.has_value()) throw Error(Errc::ParseError, "unknown ablation '" + name + "'");
      config.ablation = *a;
    }
    if (j.contains("prompt_set")) config.prompt_set = j.at("prompt_set").get<std::string>();
    if (j.contains("per_config_count")) {
      config.per_config_count = j.at("per_config_count").get<unsigned>();
    }
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, std::string("run config: ") + e.what());
  }
  try {
    config.validate();
  } catch (const Error& e) {
    throw Error(Errc::ParseError, e.what());
  }
  return config;
}

std::vector<PromptCase> prompts_for(const RunConfig& config) {
  if (config.prompt_set == "builtin") return builtin_prompt_set();
  return load_prompt_set(config.prompt_set);
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

struct GenerateOptions {
  SpecDraft draft;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string backend = "stub";
  std::string out_path;
  std::string format = "text";
  unsigned count = 1;
  GenerationConfig gen;
  std::string templates_path;
  EndpointFlags endpoints;
};

std::string output_path_for(const std::string& base, unsigned index, unsigned count) {
  if (count <= 1) return base;
  const std::filesystem::path p(base);
  char suffix[16];
  std::snprintf(suffix, sizeof(suffix), "_%04u", index);
  const std::string name = p.stem().string() + suffix + p.extension().string();
  return (p.parent_path() / name).string();
}

int cmd_generate(GenerateOptions& options, std::istream& in, std::ostream& out,
                 std::ostream& err) {
  if (!options.seed_set) options.seed = std::random_device{}();

  ExerciseSpec spec;
  if (options.draft.complete()) {
    spec = options.draft.resolve(options.seed);
    if (const auto violations = validate_spec(spec); !violations.empty()) {
      for (const auto& v : violations) {
        err << "invalid specification (" << errc_name(v.code) << "): " << v.message << "\n";
      }
      return kExitValidation;
    }
  } else {
    spec = guided_dialog(in, out, options.draft, options.seed);
  }

  BackendSet backends = make_backends(options.backend, options.endpoints);
  Backends refs = backends.refs();

  const TemplateInventory inventory = options.templates_path.empty()
                                          ? TemplateInventory::builtin()
                                          : TemplateInventory::load_file(options.templates_path);
  const Lexicon lexicon = Lexicon::with_defaults();

  bool all_accepted = true;
  for (unsigned i = 0; i < options.count; ++i) {
    ExerciseSpec item = spec;
    item.seed = spec.seed + i;  // derived seeds seed+0..count-1
    const GenerationResult result =
        generate_exercise(item, refs, options.gen, inventory, lexicon);

    std::string payload;
    if (result.accepted() && options.format == "text") {
      payload = render_exercise_text(*result.exercise);
    } else {
      // Rejections persist as the structured envelope regardless of format.
      payload = serialize_result(result, item) + "\n";
    }

    if (options.out_path.empty()) {
      out << payload;
      if (options.count > 1) out << "\n";
    } else {
      const std::string path = output_path_for(options.out_path, i, options.count);
      std::ofstream file(path, std::ios::binary);
      if (!file) {
        err << "cannot write " << path << "\n";
        return kExitValidation;
      }
      file << payload;
      out << (result.accepted() ? "accepted" : "rejected") << " -> " << path << "\n";
    }

    if (!result.accepted()) {
      all_accepted = false;
      err << "generation failed after " << result.attempts
          << " attempts (last verdict: " << to_string(result.verdict) << ")\n";
    }
  }
  return all_accepted ? kExitAccepted : kExitBudgetExhausted;
}

// ---------------------------------------------------------------------------
// evaluate / ablate
// ---------------------------------------------------------------------------

struct AxisPoint {
  RunConfig config;
  std::string axis;  // empty in factorial mode
};

RunConfig apply_axis(RunConfig config, const std::string& axis, const json& value) {
  if (axis == "hardness") {
    if (value.is_string()) {
      config.generation_hardness = hardness_from_name(value.get<std::string>());
    } else {
      config.generation_hardness = static_cast<HardnessLevel>(value.get<int>());
    }
  } else if (axis == "nucleus") {
    config.generation_nucleus = value.get<double>();
  } else if (axis == "conflict_condition") {
    config.conflict_condition = {value.at(0).get<double>(), value.at(1).get<double>()};
  } else if (axis == "coherence_nsp") {
    config.coherence_nsp = value.get<double>();
  } else if (axis == "coherence_cosdist") {
    config.coherence_cosdist = value.get<double>();
  } else {
    throw Error(Errc::ParseError, "unknown grid axis '" + axis + "'");
  }
  try {
    config.validate();
  } catch (const Error& e) {
    throw Error(Errc::ParseError, e.what());
  }
  return config;
}

std::vector<AxisPoint> grid_points(const RunConfig& base, const json& axes, bool factorial) {
  std::vector<AxisPoint> points;
  if (factorial) {
    std::vector<RunConfig> configs = {base};
    for (const auto& [axis, values] : axes.items()) {
      std::vector<RunConfig> next;
      for (const auto& config : configs) {
        for (const auto& value : values) next.push_back(apply_axis(config, axis, value));
      }
      configs = std::move(next);
    }
    for (const auto& config : configs) points.push_back({config, ""});
    return points;
  }
  for (const auto& [axis, values] : axes.items()) {
    for (const auto& value : values) points.push_back({apply_axis(base, axis, value), axis});
  }
  return points;
}

std::map<std::string, double> scalar_params(const RunConfig& config) {
  // conflict_condition is varied as a lockstep pair; its contradiction_min
  // component stands in as the scalar.
  return {
      {"generation_hardness", static_cast<double>(config.generation_hardness)},
      {"generation_nucleus", config.generation_nucleus},
      {"conflict_condition", config.conflict_condition.first},
      {"coherence_NSP", config.coherence_nsp},
      {"coherence_cosdist", config.coherence_cosdist},
  };
}

std::map<std::string, double> scalar_responses(const Metrics& m) {
  std::map<std::string, double> out = {
      {"success_pct", m.success_pct},
      {"arrangement_H", m.arrangement_entropy_bits},
      {"content_H", m.content_entropy_bits},
  };
  if (m.valid_pct.has_value()) out["valid_pct"] = *m.valid_pct;
  if (m.coherent_pct.has_value()) out["coherent_pct"] = *m.coherent_pct;
  return out;
}

std::vector<RatingRecord> ratings_for_cell(const std::vector<RatingRecord>& all,
                                           const std::vector<ExperimentRecord>& records) {
  std::set<std::string> ids;
  for (const auto& r : records) {
    if (r.accepted) ids.insert(r.exercise_id);
  }
  std::vector<RatingRecord> out;
  for (const auto& rating : all) {
    if (ids.contains(rating.exercise_id)) out.push_back(rating);
  }
  return out;
}

void print_correlation_table(std::ostream& out, const CorrelationTable& table) {
  out << "correlation";
  for (const auto& resp : table.responses) out << "," << resp;
  out << ",abs_effect\n";
  char buf[32];
  for (const auto& param : table.parameters) {
    out << param;
    for (const auto& resp : table.responses) {
      std::snprintf(buf, sizeof(buf), "%.2f", table.r.at(param).at(resp));
      out << "," << buf << (table.significant(param, resp) ? "*" : "");
    }
    std::snprintf(buf, sizeof(buf), "%.2f", table.abs_effect.at(param));
    out << "," << buf << "\n";
  }
}

struct EvalOptions {
  std::string config_path;
  std::string out_path;
  std::string correlations_path;
  std::string ratings_path;
  std::string backend = "stub";
  EndpointFlags endpoints;
  std::uint64_t seed_base = 0;
  unsigned max_attempts = 50;
  unsigned retries = 3;
  bool fixed_seeds = false;
  std::optional<unsigned> count_override;
};

void write_results(const EvalOptions& options, std::ostream& out,
                   const std::vector<std::pair<RunConfig, Metrics>>& results) {
  if (!options.out_path.empty()) {
    std::ofstream file(options.out_path);
    if (!file) throw Error(Errc::ParseError, "cannot write " + options.out_path);
    write_results_csv(file, results);
    out << "results -> " << options.out_path << "\n";
  } else {
    write_results_csv(out, results);
  }
}

int cmd_evaluate(const EvalOptions& options, std::ostream& out, std::ostream& err) {
  const json doc = load_json_file(options.config_path, "grid config");
  RunConfig base = run_config_from_json(doc.value("base", json::object()));
  if (options.count_override.has_value()) base.per_config_count = *options.count_override;
  if (!doc.contains("axes") || !doc.at("axes").is_object()) {
    throw Error(Errc::ParseError, "grid config needs an 'axes' object");
  }
  const bool factorial = doc.value("mode", "one_at_a_time") == std::string("full_factorial");
  const auto points = grid_points(base, doc.at("axes"), factorial);

  BackendSet backends = make_backends(options.backend, options.endpoints);
  Backends refs = backends.refs();
  const auto prompts = prompts_for(base);
  const auto ratings = options.ratings_path.empty() ? std::vector<RatingRecord>{}
                                                    : ingest_ratings(options.ratings_path);
  const GenerationBudget budget{options.max_attempts, options.retries};
  const CellMode mode = options.fixed_seeds ? CellMode::FixedSeedRange : CellMode::TargetAccepted;

  std::vector<std::pair<RunConfig, Metrics>> results;
  std::vector<GridPoint> cloud;
  std::map<std::string, std::vector<GridPoint>> per_axis;
  std::set<std::string> matched_rating_ids;

  for (const auto& point : points) {
    err << "grid point";
    if (!point.axis.empty()) err << " [" << point.axis << "]";
    err << " hardness=" << to_string(point.config.generation_hardness)
        << " nucleus=" << point.config.generation_nucleus
        << " nsp=" << point.config.coherence_nsp
        << " cosdist=" << point.config.coherence_cosdist << "\n";
    const auto records = run_cell(point.config, prompts, refs, budget, mode, options.seed_base);
    const auto cell_ratings = ratings_for_cell(ratings, records);
    for (const auto& r : cell_ratings) matched_rating_ids.insert(r.exercise_id);
    const Metrics metrics = compute_metrics(records, cell_ratings);
    results.push_back({point.config, metrics});

    GridPoint gp{scalar_params(point.config), scalar_responses(metrics)};
    cloud.push_back(gp);
    if (!point.axis.empty()) per_axis[point.axis].push_back(gp);
  }

  for (const auto& rating : ratings) {
    if (!matched_rating_ids.contains(rating.exercise_id)) {
      throw Error(Errc::RatingMismatch,
                  "rating references unknown exercise '" + rating.exercise_id + "'");
    }
  }

  write_results(options, out, results);

  // Correlations per varied axis (whole cloud in factorial mode). Constant
  // responses are dropped with a notice instead of failing the run.
  auto correlate = [&](const std::string& label, std::vector<GridPoint> grid,
                       const std::string& param_key) {
    if (grid.size() < 3) {
      err << "axis " << label << ": fewer than three points, correlations skipped\n";
      return;
    }
    if (!param_key.empty()) {
      for (auto& gp : grid) {
        const double kept = gp.params.at(param_key);
        gp.params = {{param_key, kept}};
      }
    }
    std::set<std::string> constant;
    for (const auto& [name, first_value] : grid.front().responses) {
      bool all_equal = true;
      for (const auto& gp : grid) {
        if (gp.responses.at(name) != first_value) {
          all_equal = false;
          break;
        }
      }
      if (all_equal) constant.insert(name);
    }
    for (auto& gp : grid) {
      for (const auto& name : constant) gp.responses.erase(name);
    }
    for (const auto& name : constant) {
      err << "axis " << label << ": response " << name << " is constant, skipped\n";
    }
    if (grid.front().responses.empty()) return;
    const CorrelationTable table = pearson_correlations(grid);
    out << "# correlations (" << label << ")\n";
    print_correlation_table(out, table);
    if (!options.correlations_path.empty()) {
      std::ofstream file(options.correlations_path, std::ios::app);
      file << "# " << label << "\n";
      print_correlation_table(file, table);
    }
  };

  if (factorial) {
    correlate("full_factorial", cloud, "");
  } else {
    static const std::map<std::string, std::string> axis_to_param = {
        {"hardness", "generation_hardness"},
        {"nucleus", "generation_nucleus"},
        {"conflict_condition", "conflict_condition"},
        {"coherence_nsp", "coherence_NSP"},
        {"coherence_cosdist", "coherence_cosdist"},
    };
    for (const auto& [axis, grid] : per_axis) correlate(axis, grid, axis_to_param.at(axis));
  }
  return kExitAccepted;
}

int cmd_ablate(const EvalOptions& options, std::ostream& out, std::ostream& err) {
  RunConfig base;
  if (!options.config_path.empty()) {
    base = run_config_from_json(load_json_file(options.config_path, "ablation config"));
  }
  if (options.count_override.has_value()) base.per_config_count = *options.count_override;

  BackendSet backends = make_backends(options.backend, options.endpoints);
  Backends refs = backends.refs();
  const auto prompts = prompts_for(base);
  const auto ratings = options.ratings_path.empty() ? std::vector<RatingRecord>{}
                                                    : ingest_ratings(options.ratings_path);
  const GenerationBudget budget{options.max_attempts, options.retries};
  const CellMode mode = options.fixed_seeds ? CellMode::FixedSeedRange : CellMode::TargetAccepted;

  const auto outcomes = run_ablation(base, prompts, refs, budget, mode, options.seed_base, &err);

  std::vector<std::pair<RunConfig, Metrics>> results;
  std::set<std::string> matched_rating_ids;
  for (const auto& outcome : outcomes) {
    Metrics metrics = outcome.metrics;
    if (!ratings.empty()) {
      const auto cell_ratings = ratings_for_cell(ratings, outcome.records);
      for (const auto& r : cell_ratings) matched_rating_ids.insert(r.exercise_id);
      metrics = compute_metrics(outcome.records, cell_ratings);
    }
    results.push_back({outcome.config, metrics});
  }
  if (!ratings.empty()) {
    for (const auto& rating : ratings) {
      if (!matched_rating_ids.contains(rating.exercise_id)) {
        throw Error(Errc::RatingMismatch,
                    "rating references unknown exercise '" + rating.exercise_id + "'");
      }
    }
  }

  write_results(options, out, results);
  return kExitAccepted;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::BudgetExhausted: return kExitBudgetExhausted;
    case Errc::BackendUnavailable: return kExitBackendUnavailable;
    case Errc::ParseError:
    case Errc::MalformedDocument: return kExitConfigParse;
    default: return kExitValidation;
  }
}

void add_endpoint_flags(CLI::App* cmd, EndpointFlags& flags) {
  cmd->add_option("--infill-endpoint", flags.infill, "neural infill endpoint");
  cmd->add_option("--nli-endpoint", flags.nli, "neural NLI endpoint");
  cmd->add_option("--nsp-endpoint", flags.nsp, "neural NSP endpoint");
  cmd->add_option("--embed-endpoint", flags.embed, "neural embedding endpoint");
}

}  // namespace

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"word problem generator for basic probability and statistics"};
  app.require_subcommand(1);

  GenerateOptions gen;
  std::string prompt_value;
  std::string type_name;
  std::string hardness_name;
  std::string labels;
  std::string noun_value;
  double p_value = 0.0;
  unsigned n_value = 0;
  unsigned k_value = 0;
  double mu_value = 0.0;
  double sigma_value = 0.0;
  std::string unit_value;

  CLI::App* generate = app.add_subcommand("generate", "generate one or more exercises");
  auto* opt_prompt = generate->add_option("--prompt", prompt_value, "context-setting prompt");
  generate->add_option("--type", type_name, "exercise type")
      ->check(CLI::IsMember({"binomial", "normal"}));
  auto* opt_noun = generate->add_option("--noun", noun_value, "trial/quantity noun");
  auto* opt_labels =
      generate->add_option("--labels", labels, "success,failure outcome labels (binomial)");
  auto* opt_p = generate->add_option("--p", p_value, "success probability (binomial)");
  auto* opt_n = generate->add_option("--n", n_value, "trial count (binomial)");
  auto* opt_k = generate->add_option("--k", k_value, "target count (binomial)");
  auto* opt_mu = generate->add_option("--mu", mu_value, "mean (normal)");
  auto* opt_sigma = generate->add_option("--sigma", sigma_value, "standard deviation (normal)");
  auto* opt_unit = generate->add_option("--unit", unit_value, "unit label (normal)");
  generate->add_option("--hardness", hardness_name, "exercise hardness")
      ->check(CLI::IsMember({"easy", "medium", "hard"}));
  auto* opt_seed = generate->add_option("--seed", gen.seed, "root random seed");
  generate->add_option("--backend", gen.backend, "infill/scorer backends")
      ->check(CLI::IsMember({"stub", "neural"}))
      ->capture_default_str();
  generate->add_option("--out", gen.out_path, "output file (stdout when omitted)");
  generate->add_option("--format", gen.format, "output format")
      ->check(CLI::IsMember({"text", "structured"}))
      ->capture_default_str();
  generate->add_option("--count", gen.count, "number of exercises (derived seeds seed+0..N-1)")
      ->capture_default_str();
  generate->add_option("--nucleus", gen.gen.infill.nucleus, "nucleus sampling threshold")
      ->capture_default_str();
  generate->add_option("--temperature", gen.gen.infill.temperature, "sampling temperature")
      ->capture_default_str();
  generate->add_option("--max-new-tokens", gen.gen.infill.max_new_tokens, "infill length bound")
      ->capture_default_str();
  generate->add_option("--max-attempts", gen.gen.budget.max_attempts, "generation attempts")
      ->capture_default_str();
  generate
      ->add_option("--retries", gen.gen.budget.per_constituent_retries,
                   "per-constituent conflict retries")
      ->capture_default_str();
  generate
      ->add_option("--contradiction-min", gen.gen.checker.conflict_contradiction_min,
                   "conflict threshold on the contradiction probability")
      ->capture_default_str();
  generate
      ->add_option("--entailment-max", gen.gen.checker.conflict_entailment_max,
                   "conflict threshold on the entailment probability")
      ->capture_default_str();
  generate->add_option("--nsp-min", gen.gen.checker.nsp_min, "coherence NSP threshold")
      ->capture_default_str();
  generate
      ->add_option("--distance-max", gen.gen.checker.distance_max,
                   "coherence cosine-distance threshold")
      ->capture_default_str();
  generate->add_option("--templates", gen.templates_path, "template inventory JSON file");
  add_endpoint_flags(generate, gen.endpoints);

  EvalOptions eval;
  unsigned eval_count = 0;
  CLI::App* evaluate = app.add_subcommand("evaluate", "run a parameter grid and correlations");
  evaluate->add_option("--config", eval.config_path, "grid config JSON")->required();
  evaluate->add_option("--out", eval.out_path, "results CSV path");
  evaluate->add_option("--out-correlations", eval.correlations_path, "correlation CSV path");
  evaluate->add_option("--ratings", eval.ratings_path, "ratings CSV (enables valid%/coherent%)");
  evaluate->add_option("--backend", eval.backend, "backends")
      ->check(CLI::IsMember({"stub", "neural"}))
      ->capture_default_str();
  evaluate->add_option("--seed-base", eval.seed_base, "seed stream base");
  evaluate->add_option("--max-attempts", eval.max_attempts, "budget per exercise")
      ->capture_default_str();
  evaluate->add_option("--retries", eval.retries, "per-constituent retries")
      ->capture_default_str();
  evaluate->add_flag("--fixed-seeds", eval.fixed_seeds,
                     "run per_config_count generations instead of collecting that many accepts");
  auto* opt_eval_count = evaluate->add_option("--count", eval_count, "per_config_count override");
  add_endpoint_flags(evaluate, eval.endpoints);

  EvalOptions ablate;
  unsigned ablate_count = 0;
  CLI::App* ablate_cmd = app.add_subcommand("ablate", "run the six-configuration ablation");
  ablate_cmd->add_option("--config", ablate.config_path, "base config JSON (optional)");
  ablate_cmd->add_option("--out", ablate.out_path, "results CSV path");
  ablate_cmd->add_option("--ratings", ablate.ratings_path, "ratings CSV");
  ablate_cmd->add_option("--backend", ablate.backend, "backends")
      ->check(CLI::IsMember({"stub", "neural"}))
      ->capture_default_str();
  ablate_cmd->add_option("--seed-base", ablate.seed_base, "seed stream base");
  ablate_cmd->add_option("--max-attempts", ablate.max_attempts, "budget per exercise")
      ->capture_default_str();
  ablate_cmd->add_option("--retries", ablate.retries, "per-constituent retries")
      ->capture_default_str();
  ablate_cmd->add_flag("--fixed-seeds", ablate.fixed_seeds,
                       "run per_config_count generations per cell");
  auto* opt_ablate_count =
      ablate_cmd->add_option("--count", ablate_count, "per_config_count override");
  add_endpoint_flags(ablate_cmd, ablate.endpoints);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return kExitAccepted;
    }
    err << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (generate->parsed()) {
      if (opt_prompt->count() > 0) gen.draft.prompt = prompt_value;
      if (type_name == "binomial") gen.draft.etype = ExerciseType::Binomial;
      if (type_name == "normal") gen.draft.etype = ExerciseType::Normal;
      if (opt_noun->count() > 0) gen.draft.noun = noun_value;
      if (opt_labels->count() > 0) {
        const auto comma = labels.find(',');
        if (comma == std::string::npos) {
          err << "--labels expects 'success,failure'\n";
          return kExitValidation;
        }
        gen.draft.success_label = text::trim(labels.substr(0, comma));
        gen.draft.failure_label = text::trim(labels.substr(comma + 1));
      }
      if (opt_p->count() > 0) gen.draft.probability = p_value;
      if (opt_n->count() > 0) gen.draft.trials_n = n_value;
      if (opt_k->count() > 0) gen.draft.target_k = k_value;
      if (opt_mu->count() > 0) gen.draft.mean = mu_value;
      if (opt_sigma->count() > 0) gen.draft.std_dev = sigma_value;
      if (opt_unit->count() > 0) gen.draft.unit = unit_value;
      if (hardness_name == "easy") gen.draft.hardness = HardnessLevel::Easy;
      if (hardness_name == "medium") gen.draft.hardness = HardnessLevel::Medium;
      if (hardness_name == "hard") gen.draft.hardness = HardnessLevel::Hard;
      gen.seed_set = opt_seed->count() > 0;
      return cmd_generate(gen, in, out, err);
    }
    if (evaluate->parsed()) {
      if (opt_eval_count->count() > 0) eval.count_override = eval_count;
      return cmd_evaluate(eval, out, err);
    }
    if (opt_ablate_count->count() > 0) ablate.count_override = ablate_count;
    return cmd_ablate(ablate, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace wpgen::cli
