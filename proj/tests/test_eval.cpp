#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "wpgen/eval.hpp"

using namespace wpgen;

namespace {

ExperimentRecord record(const std::string& id, bool accepted, unsigned attempts,
                        const std::string& arrangement, const std::string& prompt_id) {
  ExperimentRecord r;
  r.exercise_id = id;
  r.accepted = accepted;
  r.attempts = attempts;
  r.arrangement_string = arrangement;
  r.prompt_id = prompt_id;
  return r;
}

struct StubWorld {
  StubInfillBackend infill;
  oracle::MarkerNli nli{StubInfillBackend::kConflictMarker};
  oracle::MarkerNsp nsp{StubInfillBackend::kIncoherenceMarker};
  oracle::TableEmbedding emb;
  Backends backends{infill, nli, nsp, emb};
};

}  // namespace

TEST_CASE("entropy of canonical distributions") {
  CHECK(entropy_bits({{"a", 1}}) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(entropy_bits({{"a", 1}, {"b", 1}, {"c", 1}, {"d", 1}}) == doctest::Approx(2.0));
  const double h = entropy_bits({{"a", 2}, {"b", 1}, {"c", 1}});
  CHECK(std::fabs(h - 1.5) < 1e-9);
}

TEST_CASE("entropy ignores zero counts and rejects empty input") {
  CHECK(entropy_bits({{"a", 4}, {"ghost", 0}}) == doctest::Approx(0.0));
  CHECK_THROWS_AS((void)entropy_bits({}), Error);
  CHECK_THROWS_AS((void)entropy_bits({{"ghost", 0}}), Error);
}

TEST_CASE("entropy is bounded by log2 of the support size") {
  std::map<std::string, std::uint64_t> skewed = {{"a", 7}, {"b", 2}, {"c", 1}};
  const double h = entropy_bits(skewed);
  CHECK(h >= 0.0);
  CHECK(h <= std::log2(3.0) + 1e-12);
}

TEST_CASE("success percentage is accepted over attempts") {
  std::vector<ExperimentRecord> records;
  for (int i = 0; i < 10; ++i) {
    records.push_back(record("e" + std::to_string(i), true, 10, "P I 0", "p"));
  }
  const Metrics m = compute_metrics(records, {});
  CHECK(m.success_pct == doctest::Approx(10.0));  // 10 accepted / 100 attempts
  CHECK_FALSE(m.valid_pct.has_value());
  CHECK_FALSE(m.coherent_pct.has_value());
}

TEST_CASE("degenerate arrangement distribution has zero entropy") {
  std::vector<ExperimentRecord> records;
  for (int i = 0; i < 8; ++i) {
    records.push_back(record("e" + std::to_string(i), true, 1, "P I 0 I 1 I 2", "p"));
  }
  CHECK(compute_metrics(records, {}).arrangement_entropy_bits == doctest::Approx(0.0));
}

TEST_CASE("uniform prompt survival yields log2(N) content entropy") {
  std::vector<ExperimentRecord> records;
  for (int i = 0; i < 100; ++i) {
    records.push_back(record("e" + std::to_string(i), true, 1, "P I 0", "prompt" + std::to_string(i)));
  }
  const Metrics m = compute_metrics(records, {});
  CHECK(std::fabs(m.content_entropy_bits - std::log2(100.0)) < 1e-9);
  CHECK(m.content_entropy_bits == doctest::Approx(6.643856189774724));
}

TEST_CASE("majority vote over raters") {
  std::vector<ExperimentRecord> records = {record("e0", true, 1, "P I 0", "p"),
                                           record("e1", true, 1, "P I 0", "p")};
  std::vector<RatingRecord> ratings = {
      {"e0", "r1", true, true},  {"e0", "r2", true, false}, {"e0", "r3", false, false},
      {"e1", "r1", false, true}, {"e1", "r2", true, true},  {"e1", "r3", true, true},
  };
  const Metrics m = compute_metrics(records, ratings);
  REQUIRE(m.valid_pct.has_value());
  REQUIRE(m.coherent_pct.has_value());
  CHECK(*m.valid_pct == doctest::Approx(100.0));   // e0: 2/3 valid, e1: 2/3 valid
  CHECK(*m.coherent_pct == doctest::Approx(50.0));  // e0: 1/3, e1: 3/3
}

TEST_CASE("ratings must cover every accepted exercise to be reported") {
  std::vector<ExperimentRecord> records = {record("e0", true, 1, "P I 0", "p"),
                                           record("e1", true, 1, "P I 0", "p")};
  std::vector<RatingRecord> partial = {{"e0", "r1", true, true}};
  const Metrics m = compute_metrics(records, partial);
  CHECK_FALSE(m.valid_pct.has_value());
  CHECK_FALSE(m.coherent_pct.has_value());
}

TEST_CASE("unknown exercise ids in ratings are an error") {
  std::vector<ExperimentRecord> records = {record("e0", true, 1, "P I 0", "p")};
  std::vector<RatingRecord> ratings = {{"nope", "r1", true, true}};
  CHECK_THROWS_AS((void)compute_metrics(records, ratings), Error);
}

TEST_CASE("pearson r on affine data is exactly one") {
  std::vector<double> x;
  std::vector<double> y;
  for (int i = 0; i < 20; ++i) {
    x.push_back(i);
    y.push_back(2.5 * i + 1.0);
  }
  CHECK(std::fabs(pearson_r(x, y) - 1.0) < 1e-9);
  for (auto& v : y) v = -v;
  CHECK(std::fabs(pearson_r(x, y) + 1.0) < 1e-9);
}

TEST_CASE("pearson r rejects constant samples") {
  std::vector<double> x = {1.0, 1.0, 1.0};
  std::vector<double> y = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS((void)pearson_r(x, y), Error);
  CHECK_THROWS_AS((void)pearson_r(y, x), Error);
}

TEST_CASE("published correlation rows reproduce their absolute effects") {
  const std::vector<double> nucleus_row = {-0.37, -0.56, 0.14, 0.49, -0.10};
  CHECK(std::fabs(abs_effect(nucleus_row) - 1.66) < 1e-9);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.2f", abs_effect(nucleus_row));
  CHECK(std::string(buf) == "1.66");

  const std::vector<double> nsp_row = {-0.45, 0.37, 0.01, -0.34, -0.20};
  CHECK(std::fabs(abs_effect(nsp_row) - 1.37) < 1e-9);

  const std::vector<double> conflict_row = {0.29, -0.25, -0.06, 0.30, -0.06};
  CHECK(std::fabs(abs_effect(conflict_row) - 0.96) < 1e-9);
}

TEST_CASE("correlation table over a synthetic grid") {
  std::vector<GridPoint> grid;
  for (int i = 0; i < 5; ++i) {
    GridPoint gp;
    gp.params["alpha"] = i;
    gp.responses["up"] = 3.0 * i + 2.0;
    gp.responses["down"] = -1.0 * i;
    grid.push_back(gp);
  }
  const CorrelationTable table = pearson_correlations(grid);
  CHECK(std::fabs(table.r.at("alpha").at("up") - 1.0) < 1e-9);
  CHECK(std::fabs(table.r.at("alpha").at("down") + 1.0) < 1e-9);
  CHECK(std::fabs(table.abs_effect.at("alpha") - 2.0) < 1e-9);
  CHECK(table.significant("alpha", "up"));

  CHECK_THROWS_AS((void)pearson_correlations(std::vector<GridPoint>(grid.begin(), grid.begin() + 2)),
                  Error);

  // constant parameter -> ZeroVariance
  std::vector<GridPoint> flat = grid;
  for (auto& gp : flat) gp.params["alpha"] = 1.0;
  CHECK_THROWS_AS((void)pearson_correlations(flat), Error);
}

TEST_CASE("ratings ingestion parses well-formed files") {
  const std::string path = "test_eval_ratings.csv";
  {
    std::ofstream out(path);
    out << "exercise_id,rater_id,valid,coherent\n"
        << "e0,alice,1,1\n"
        << "e0,bob,0,1\n"
        << "e1,alice,1,0\n";
  }
  const auto records = ingest_ratings(path);
  REQUIRE(records.size() == 3);
  CHECK(records[0].exercise_id == "e0");
  CHECK(records[0].rater_id == "alice");
  CHECK(records[0].valid);
  CHECK(records[2].coherent == false);
  std::remove(path.c_str());
}

TEST_CASE("ratings ingestion rejects duplicates and malformed rows") {
  std::stringstream dup("exercise_id,rater_id,valid,coherent\ne0,alice,1,1\ne0,alice,0,0\n");
  CHECK_THROWS_AS((void)ingest_ratings_stream(dup), Error);

  std::stringstream bad_header("id,rater,valid,coherent\ne0,alice,1,1\n");
  CHECK_THROWS_AS((void)ingest_ratings_stream(bad_header), Error);

  std::stringstream bad_flag("exercise_id,rater_id,valid,coherent\ne0,alice,2,1\n");
  try {
    (void)ingest_ratings_stream(bad_flag);
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ParseError);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }

  std::stringstream short_row("exercise_id,rater_id,valid,coherent\ne0,alice,1\n");
  CHECK_THROWS_AS((void)ingest_ratings_stream(short_row), Error);

  CHECK_THROWS_AS((void)ingest_ratings("definitely_missing.csv"), Error);
}

TEST_CASE("checking funnel is a strict filter on one seed stream") {
  StubWorld world;
  RunConfig base;
  base.generation_nucleus = 1.0;
  base.per_config_count = 400;
  base.generation_hardness = HardnessLevel::Easy;
  const GenerationBudget budget{1, 0};

  auto accepted_seeds = [&](Ablation ablation) {
    RunConfig config = base;
    config.ablation = ablation;
    std::set<std::string> ids;
    for (const auto& r :
         run_cell(config, builtin_prompt_set(), world.backends, budget, CellMode::FixedSeedRange)) {
      if (r.accepted) ids.insert(r.exercise_id.substr(r.exercise_id.rfind('-')));
    }
    return ids;
  };

  const auto none = accepted_seeds(Ablation::None);
  const auto conflict = accepted_seeds(Ablation::Conflict);
  const auto full = accepted_seeds(Ablation::Full);

  CHECK(none.size() == 400);
  CHECK(conflict.size() < none.size());
  CHECK(full.size() < conflict.size());
  CHECK(std::includes(none.begin(), none.end(), conflict.begin(), conflict.end()));
  CHECK(std::includes(conflict.begin(), conflict.end(), full.begin(), full.end()));
}

TEST_CASE("run_cell in target mode collects the requested number of accepts") {
  StubWorld world;
  RunConfig config;
  config.generation_nucleus = 1.0;
  config.per_config_count = 25;
  config.generation_hardness = HardnessLevel::Easy;
  config.ablation = Ablation::Full;
  const auto records = run_cell(config, builtin_prompt_set(), world.backends,
                                GenerationBudget{5, 2}, CellMode::TargetAccepted);
  unsigned accepted = 0;
  for (const auto& r : records) {
    if (r.accepted) ++accepted;
  }
  CHECK(accepted == 25);
}

TEST_CASE("ablation runner covers six configurations by three hardness levels") {
  StubWorld world;
  RunConfig base;
  base.generation_nucleus = 1.0;
  base.per_config_count = 30;
  const auto outcomes = run_ablation(base, builtin_prompt_set(), world.backends,
                                     GenerationBudget{1, 0}, CellMode::FixedSeedRange);
  REQUIRE(outcomes.size() == 18);
  std::set<std::pair<int, int>> cells;
  for (const auto& outcome : outcomes) {
    cells.insert({static_cast<int>(outcome.config.ablation),
                  static_cast<int>(outcome.config.generation_hardness)});
    if (outcome.config.ablation == Ablation::None) {
      CHECK(outcome.metrics.success_pct == doctest::Approx(100.0));
    }
  }
  CHECK(cells.size() == 18);
}

TEST_CASE("results csv has one row per config and metric") {
  RunConfig config;
  Metrics metrics;
  metrics.success_pct = 51.2;
  metrics.arrangement_entropy_bits = 1.25;
  metrics.content_entropy_bits = 3.0;
  std::vector<std::pair<RunConfig, Metrics>> results = {{config, metrics}};
  std::stringstream out;
  write_results_csv(out, results);

  std::string line;
  std::vector<std::string> lines;
  while (std::getline(out, line)) lines.push_back(line);
  REQUIRE(lines.size() == 1 + 5);  // header + five metrics
  CHECK(lines[0].find("ablation,hardness,nucleus") == 0);
  CHECK(lines[1].find("success_pct,51.2") != std::string::npos);
  CHECK(lines[2].find("valid_pct,absent") != std::string::npos);
}

TEST_CASE("prompt set files load and validate") {
  const std::string path = "test_eval_prompts.json";
  {
    std::ofstream out(path);
    out << R"([{"id": "x", "prompt": "A test prompt.", "type": "binomial",
                "params": {"success_probability": 0.5, "trial_noun": "coin",
                           "outcome_labels": ["heads", "tails"],
                           "trial_count_n": 4, "target_count_k": 2}}])";
  }
  const auto prompts = load_prompt_set(path);
  REQUIRE(prompts.size() == 1);
  CHECK(prompts[0].id == "x");
  CHECK(type_of(prompts[0].params) == ExerciseType::Binomial);
  std::remove(path.c_str());

  CHECK_THROWS_AS((void)load_prompt_set("missing_prompts.json"), Error);
  CHECK(builtin_prompt_set().size() >= 8);
}
