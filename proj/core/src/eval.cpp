#include "wpgen/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "wpgen/text.hpp"

namespace wpgen {

void RunConfig::validate() const {
  auto open_unit = [](double x) { return x > 0.0 && x < 1.0; };
  if (!open_unit(generation_nucleus) && generation_nucleus != 1.0) {
    throw Error(Errc::InvalidConfig, "generation_nucleus must lie in (0,1]");
  }
  if (!open_unit(conflict_condition.first) || !open_unit(conflict_condition.second) ||
      !open_unit(coherence_nsp) || !open_unit(coherence_cosdist)) {
    throw Error(Errc::InvalidConfig, "checker thresholds must lie in (0,1)");
  }
  if (per_config_count < 1) {
    throw Error(Errc::InvalidConfig, "per_config_count must be at least 1");
  }
}

GenerationConfig RunConfig::generation_config(const GenerationBudget& budget) const {
  GenerationConfig cfg;
  cfg.checker.conflict_contradiction_min = conflict_condition.first;
  cfg.checker.conflict_entailment_max = conflict_condition.second;
  cfg.checker.nsp_min = coherence_nsp;
  cfg.checker.distance_max = coherence_cosdist;
  cfg.toggles = CheckerToggles::from_ablation(ablation);
  cfg.budget = budget;
  cfg.infill.nucleus = generation_nucleus;
  return cfg;
}

double entropy_bits(const std::map<std::string, std::uint64_t>& counts) {
  std::uint64_t total = 0;
  for (const auto& [_, c] : counts) total += c;
  if (total == 0) throw Error(Errc::EmptyCounts, "entropy of an empty distribution");
  double h = 0.0;
  for (const auto& [_, c] : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

Metrics compute_metrics(std::span<const ExperimentRecord> records,
                        std::span<const RatingRecord> ratings) {
  Metrics m;
  std::uint64_t attempts = 0;
  std::uint64_t accepted = 0;
  std::map<std::string, std::uint64_t> arrangement_counts;
  std::map<std::string, std::uint64_t> prompt_counts;
  std::set<std::string> accepted_ids;
  for (const auto& r : records) {
    attempts += r.attempts;
    if (r.accepted) {
      ++accepted;
      ++arrangement_counts[r.arrangement_string];
      ++prompt_counts[r.prompt_id];
      accepted_ids.insert(r.exercise_id);
    }
  }
  m.success_pct = attempts == 0
                      ? 0.0
                      : 100.0 * static_cast<double>(accepted) / static_cast<double>(attempts);
  m.arrangement_entropy_bits = accepted == 0 ? 0.0 : entropy_bits(arrangement_counts);
  m.content_entropy_bits = accepted == 0 ? 0.0 : entropy_bits(prompt_counts);

  if (ratings.empty() || accepted == 0) return m;

  struct Tally {
    unsigned raters = 0;
    unsigned valid = 0;
    unsigned coherent = 0;
  };
  std::map<std::string, Tally> tallies;
  for (const auto& rating : ratings) {
    if (!accepted_ids.contains(rating.exercise_id)) {
      throw Error(Errc::RatingMismatch,
                  "rating references unknown exercise '" + rating.exercise_id + "'");
    }
    Tally& t = tallies[rating.exercise_id];
    ++t.raters;
    if (rating.valid) ++t.valid;
    if (rating.coherent) ++t.coherent;
  }
  if (tallies.size() < accepted_ids.size()) return m;  // incomplete coverage: report absent

  unsigned valid_majority = 0;
  unsigned coherent_majority = 0;
  for (const auto& [_, t] : tallies) {
    if (2 * t.valid > t.raters) ++valid_majority;
    if (2 * t.coherent > t.raters) ++coherent_majority;
  }
  m.valid_pct = 100.0 * static_cast<double>(valid_majority) / static_cast<double>(tallies.size());
  m.coherent_pct =
      100.0 * static_cast<double>(coherent_majority) / static_cast<double>(tallies.size());
  return m;
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(Errc::InvalidConfig, "pearson_r needs two equally sized samples");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(Errc::ZeroVariance, "constant sample in correlation");
  }
  return sxy / std::sqrt(sxx * syy);
}

bool CorrelationTable::significant(const std::string& parameter,
                                   const std::string& response) const {
  return std::fabs(r.at(parameter).at(response)) > significance_threshold;
}

CorrelationTable pearson_correlations(std::span<const GridPoint> grid) {
  if (grid.size() < 3) {
    throw Error(Errc::InvalidConfig, "correlation grid needs at least three points");
  }
  CorrelationTable table;
  std::set<std::string> params;
  std::set<std::string> responses;
  for (const auto& point : grid) {
    for (const auto& [k, _] : point.params) params.insert(k);
    for (const auto& [k, _] : point.responses) responses.insert(k);
  }
  table.parameters.assign(params.begin(), params.end());
  table.responses.assign(responses.begin(), responses.end());

  auto column = [&](const std::string& key, bool is_param) {
    std::vector<double> out;
    for (const auto& point : grid) {
      const auto& m = is_param ? point.params : point.responses;
      auto it = m.find(key);
      if (it == m.end()) {
        throw Error(Errc::InvalidConfig, "grid point missing column '" + key + "'");
      }
      out.push_back(it->second);
    }
    return out;
  };

  for (const auto& p : table.parameters) {
    const auto xs = column(p, true);
    double row_sum = 0.0;
    for (const auto& resp : table.responses) {
      const auto ys = column(resp, false);
      const double r = pearson_r(xs, ys);
      table.r[p][resp] = r;
      row_sum += std::fabs(r);
    }
    table.abs_effect[p] = row_sum;
  }
  return table;
}

double abs_effect(std::span<const double> row) {
  double sum = 0.0;
  for (double r : row) sum += std::fabs(r);
  return sum;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(text::trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

bool parse_flag(const std::string& s, std::size_t line_no) {
  if (s == "0") return false;
  if (s == "1") return true;
  throw Error(Errc::ParseError,
              "line " + std::to_string(line_no) + ": flag must be 0 or 1, got '" + s + "'");
}

}  // namespace

std::vector<RatingRecord> ingest_ratings_stream(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<RatingRecord> records;
  std::set<std::pair<std::string, std::string>> seen;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string trimmed = text::trim(line);
    if (trimmed.empty()) continue;
    const auto fields = split_csv_line(trimmed);
    if (line_no == 1) {
      if (fields != std::vector<std::string>{"exercise_id", "rater_id", "valid", "coherent"}) {
        throw Error(Errc::ParseError,
                    "line 1: header must be exercise_id,rater_id,valid,coherent");
      }
      continue;
    }
    if (fields.size() != 4) {
      throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected 4 fields");
    }
    RatingRecord r{fields[0], fields[1], parse_flag(fields[2], line_no),
                   parse_flag(fields[3], line_no)};
    if (r.exercise_id.empty() || r.rater_id.empty()) {
      throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": empty id");
    }
    if (!seen.insert({r.exercise_id, r.rater_id}).second) {
      throw Error(Errc::DuplicateRating,
                  "rater '" + r.rater_id + "' rated '" + r.exercise_id + "' twice");
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<RatingRecord> ingest_ratings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open ratings file " + path);
  return ingest_ratings_stream(in);
}

const std::vector<PromptCase>& builtin_prompt_set() {
  static const std::vector<PromptCase> prompts = [] {
    std::vector<PromptCase> out;
    out.push_back({"traffic", "Berlin is the German city with the most traffic lights per capita.",
                   BinomialParams{0.55, "traffic light", {"red", "green"}, 8, 5}});
    out.push_back({"water", "The average human drinks too little water per day.",
                   NormalParams{428.0, 24.0, "water consumption", "ml"}});
    out.push_back({"coins", "Street magicians love tricks that involve flipping coins.",
                   BinomialParams{0.5, "coin", {"heads", "tails"}, 10, 4}});
    out.push_back({"exams", "Final exams at the academy are notoriously unpredictable.",
                   BinomialParams{0.7, "exam", {"passed", "failed"}, 6, 4}});
    out.push_back({"batteries", "A factory produces batteries around the clock.",
                   BinomialParams{0.9, "battery", {"functional", "defective"}, 12, 10}});
    out.push_back({"height", "People visiting the clinic get their height measured.",
                   NormalParams{1.8, 0.1, "body height", "m"}});
    out.push_back({"rain", "The coastal town keeps careful records of its weather.",
                   NormalParams{62.0, 11.5, "monthly rainfall", "mm"}});
    out.push_back({"days", "I am currently very busy writing a long report.",
                   BinomialParams{0.75, "day", {"productive", "lazy"}, 7, 5}});
    out.push_back({"sleep", "Students rarely get as much rest as they should.",
                   NormalParams{7.1, 0.8, "sleep duration", "h"}});
    out.push_back({"dice", "Board game nights at the dormitory get competitive quickly.",
                   BinomialParams{0.17, "die", {"showing a six", "showing another face"}, 5, 1}});
    return out;
  }();
  return prompts;
}

std::vector<PromptCase> load_prompt_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open prompt set " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("prompt set: ") + e.what());
  }
  if (!doc.is_array()) throw Error(Errc::ParseError, "prompt set must be a JSON array");
  std::vector<PromptCase> out;
  for (const auto& rec : doc) {
    try {
      PromptCase pc;
      pc.id = rec.at("id").get<std::string>();
      pc.prompt = rec.at("prompt").get<std::string>();
      const std::string type = rec.at("type").get<std::string>();
      const auto& p = rec.at("params");
      if (type == "binomial") {
        BinomialParams b;
        b.success_probability = p.at("success_probability").get<double>();
        b.trial_noun = p.at("trial_noun").get<std::string>();
        b.outcome_labels = {p.at("outcome_labels").at(0).get<std::string>(),
                            p.at("outcome_labels").at(1).get<std::string>()};
        b.trial_count_n = p.at("trial_count_n").get<unsigned>();
        b.target_count_k = p.at("target_count_k").get<unsigned>();
        pc.params = b;
      } else if (type == "normal") {
        NormalParams g;
        g.mean = p.at("mean").get<double>();
        g.std_dev = p.at("std_dev").get<double>();
        g.quantity_noun = p.at("quantity_noun").get<std::string>();
        g.unit = p.at("unit").get<std::string>();
        pc.params = g;
      } else {
        throw Error(Errc::ParseError, "unknown exercise type " + type);
      }
      out.push_back(std::move(pc));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::ParseError, std::string("prompt record: ") + e.what());
    }
  }
  return out;
}

std::vector<ExperimentRecord> run_cell(const RunConfig& config,
                                       std::span<const PromptCase> prompts, Backends& backends,
                                       const GenerationBudget& budget, CellMode mode,
                                       std::uint64_t seed_base) {
  config.validate();
  if (prompts.empty()) throw Error(Errc::InvalidConfig, "empty prompt set");

  const GenerationConfig gen_cfg = config.generation_config(budget);
  const auto hardness_tag = static_cast<std::uint64_t>(config.generation_hardness);

  std::vector<ExperimentRecord> records;
  unsigned accepted = 0;
  const std::uint64_t safety_cap =
      mode == CellMode::TargetAccepted ? std::uint64_t{1000} * config.per_config_count
                                       : config.per_config_count;
  for (std::uint64_t i = 0; i < safety_cap; ++i) {
    if (mode == CellMode::TargetAccepted && accepted >= config.per_config_count) break;

    const PromptCase& pc = prompts[i % prompts.size()];
    ExerciseSpec spec;
    spec.prompt = pc.prompt;
    spec.params = pc.params;
    spec.hardness = config.generation_hardness;
    // Seeds never see the ablation, so variants share one candidate stream.
    spec.seed = mix_seed(seed_base, {hardness_tag, i});

    GenerationResult result = generate_exercise(spec, backends, gen_cfg);

    ExperimentRecord rec;
    rec.config = config;
    rec.exercise_id = std::string(to_string(config.ablation)) + "-" +
                      to_string(config.generation_hardness) + "-" + std::to_string(i);
    rec.attempts = result.attempts;
    rec.accepted = result.accepted();
    rec.arrangement_string = result.accepted() ? result.exercise->arrangement.str() : "";
    rec.prompt_id = pc.id;
    rec.reports = std::move(result.reports);
    if (rec.accepted) ++accepted;
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<AblationOutcome> run_ablation(const RunConfig& base,
                                          std::span<const PromptCase> prompts, Backends& backends,
                                          const GenerationBudget& budget, CellMode mode,
                                          std::uint64_t seed_base, std::ostream* progress) {
  std::vector<AblationOutcome> outcomes;
  for (Ablation ablation : {Ablation::None, Ablation::Conflict, Ablation::CoherenceCosdistNsp,
                            Ablation::ConflictCoherenceCosdist, Ablation::ConflictCoherenceNsp,
                            Ablation::Full}) {
    for (HardnessLevel h : {HardnessLevel::Easy, HardnessLevel::Medium, HardnessLevel::Hard}) {
      RunConfig config = base;
      config.ablation = ablation;
      config.generation_hardness = h;
      if (progress != nullptr) {
        *progress << "running ablation=" << to_string(ablation) << " hardness=" << to_string(h)
                  << "...\n";
      }
      AblationOutcome outcome{config,
                              run_cell(config, prompts, backends, budget, mode, seed_base),
                              {}};
      outcome.metrics = compute_metrics(outcome.records, {});
      outcomes.push_back(std::move(outcome));
    }
  }
  return outcomes;
}

void write_results_csv(std::ostream& out,
                       std::span<const std::pair<RunConfig, Metrics>> results) {
  out << "ablation,hardness,nucleus,contradiction_min,entailment_max,nsp_min,distance_max,"
         "prompt_set,per_config_count,metric,value\n";
  for (const auto& [config, metrics] : results) {
    auto row = [&](const std::string& metric, const std::optional<double>& value) {
      out << to_string(config.ablation) << ',' << to_string(config.generation_hardness) << ','
          << config.generation_nucleus << ',' << config.conflict_condition.first << ','
          << config.conflict_condition.second << ',' << config.coherence_nsp << ','
          << config.coherence_cosdist << ',' << config.prompt_set << ','
          << config.per_config_count << ',' << metric << ',';
      if (value.has_value()) {
        out << *value;
      } else {
        out << "absent";
      }
      out << '\n';
    };
    row("success_pct", metrics.success_pct);
    row("valid_pct", metrics.valid_pct);
    row("coherent_pct", metrics.coherent_pct);
    row("arrangement_entropy_bits", metrics.arrangement_entropy_bits);
    row("content_entropy_bits", metrics.content_entropy_bits);
  }
}

}  // namespace wpgen
