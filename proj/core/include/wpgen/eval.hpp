#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wpgen/controller.hpp"
#include "wpgen/model.hpp"

namespace wpgen {

struct RunConfig {
  HardnessLevel generation_hardness = HardnessLevel::Medium;
  double generation_nucleus = 0.5;
  std::pair<double, double> conflict_condition = {0.5, 0.2};  // (contradiction_min, entailment_max)
  double coherence_nsp = 0.99;
  double coherence_cosdist = 0.3;
  Ablation ablation = Ablation::Full;
  std::string prompt_set = "builtin";
  unsigned per_config_count = 100;  // accepted exercises per cell

  void validate() const;
  GenerationConfig generation_config(const GenerationBudget& budget) const;
};

struct ExperimentRecord {
  RunConfig config;
  std::string exercise_id;
  unsigned attempts = 1;
  bool accepted = false;
  std::string arrangement_string;  // space-joined tokens, empty when rejected
  std::string prompt_id;
  std::vector<CheckReport> reports;
};

struct RatingRecord {
  std::string exercise_id;
  std::string rater_id;
  bool valid = false;
  bool coherent = false;
};

// Shannon entropy in bits of the empirical distribution behind the counts.
// Zero-count entries are ignored. Throws EmptyCounts when nothing remains.
double entropy_bits(const std::map<std::string, std::uint64_t>& counts);

struct Metrics {
  double success_pct = 0.0;               // accepted / attempts, in percent
  std::optional<double> valid_pct;        // absent without full rating coverage
  std::optional<double> coherent_pct;
  double arrangement_entropy_bits = 0.0;  // over accepted records
  double content_entropy_bits = 0.0;      // over accepted records' prompt ids
};

// valid%/coherent% are per-exercise majority votes over raters and stay
// absent unless every accepted record has at least one rating. Throws
// RatingMismatch when a rating references an unknown exercise id.
Metrics compute_metrics(std::span<const ExperimentRecord> records,
                        std::span<const RatingRecord> ratings);

// Sample Pearson correlation. Throws ZeroVariance when either side is
// constant.
double pearson_r(std::span<const double> x, std::span<const double> y);

struct GridPoint {
  std::map<std::string, double> params;
  std::map<std::string, double> responses;
};

struct CorrelationTable {
  std::vector<std::string> parameters;
  std::vector<std::string> responses;
  std::map<std::string, std::map<std::string, double>> r;  // r[param][response]
  std::map<std::string, double> abs_effect;                // row sum of |r|
  double significance_threshold = 0.30;

  bool significant(const std::string& parameter, const std::string& response) const;
};

// One r per (parameter, response) pair over the grid. Requires at least
// three grid points; throws ZeroVariance on constant columns.
CorrelationTable pearson_correlations(std::span<const GridPoint> grid);

// Row sum of absolute correlation coefficients.
double abs_effect(std::span<const double> row);

// CSV with header exercise_id,rater_id,valid,coherent and 0/1 flags.
// Throws ParseError (with line number) and DuplicateRating.
std::vector<RatingRecord> ingest_ratings(const std::string& path);
std::vector<RatingRecord> ingest_ratings_stream(std::istream& in);

struct PromptCase {
  std::string id;
  std::string prompt;
  DistributionParams params;
};

// Heterogeneous demo prompts covering both exercise types.
const std::vector<PromptCase>& builtin_prompt_set();

// JSON prompt-set file: array of {id, prompt, type, params}. Throws
// ParseError.
std::vector<PromptCase> load_prompt_set(const std::string& path);

enum class CellMode {
  TargetAccepted,  // run until per_config_count accepted (with a safety cap)
  FixedSeedRange,  // run exactly per_config_count generations
};

// Runs one configuration cell. Seeds derive from (hardness, stream index)
// only, never from the ablation, so every ablation variant sees the same
// candidate stream and the checking funnel is a strict filter.
std::vector<ExperimentRecord> run_cell(const RunConfig& config,
                                       std::span<const PromptCase> prompts, Backends& backends,
                                       const GenerationBudget& budget, CellMode mode,
                                       std::uint64_t seed_base = 0);

struct AblationOutcome {
  RunConfig config;
  std::vector<ExperimentRecord> records;
  Metrics metrics;
};

// All six checker configurations x three hardness levels on one prompt set
// and one derived seed stream.
std::vector<AblationOutcome> run_ablation(const RunConfig& base,
                                          std::span<const PromptCase> prompts, Backends& backends,
                                          const GenerationBudget& budget,
                                          CellMode mode = CellMode::TargetAccepted,
                                          std::uint64_t seed_base = 0,
                                          std::ostream* progress = nullptr);

// One row per (config, metric); every RunConfig field is flattened into
// columns.
void write_results_csv(std::ostream& out,
                       std::span<const std::pair<RunConfig, Metrics>> results);

}  // namespace wpgen
