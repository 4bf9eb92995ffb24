#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "wpgen/cli.hpp"
#include "wpgen/controller.hpp"

using namespace wpgen;

namespace {

int run_cli(const std::vector<std::string>& args, const std::string& stdin_text,
            std::string* out_text = nullptr, std::string* err_text = nullptr) {
  std::vector<const char*> argv = {"wpgen"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::istringstream in(stdin_text);
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), in, out, err);
  if (out_text != nullptr) *out_text = out.str();
  if (err_text != nullptr) *err_text = err.str();
  return code;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::vector<std::string> kFullFlags = {
    "generate", "--prompt", "Berlin is the German city with the most traffic lights per capita.",
    "--type", "binomial", "--noun", "traffic light", "--labels", "red,green",
    "--p", "0.55", "--n", "8", "--k", "5", "--hardness", "hard",
    "--seed", "42", "--backend", "stub"};

}  // namespace

TEST_CASE("guided dialog re-prompts with the violated rule") {
  std::istringstream in(
      "Berlin is the German city with the most traffic lights per capita.\n"
      "binomial\n"
      "traffic light\n"
      "red\n"
      "green\n"
      "110%\n"
      "55%\n"
      "8\n"
      "5\n"
      "hard\n");
  std::ostringstream out;
  const ExerciseSpec spec = cli::guided_dialog(in, out, {}, 42);

  CHECK(out.str().find("ProbabilityOutOfRange") != std::string::npos);
  CHECK(validate_spec(spec).empty());
  const auto& b = std::get<BinomialParams>(spec.params);
  CHECK(b.success_probability == doctest::Approx(0.55));
  CHECK(b.trial_count_n == 8);
  CHECK(spec.hardness == HardnessLevel::Hard);
  CHECK(spec.seed == 42);
}

TEST_CASE("guided dialog skips binomial-only prompts for normal exercises") {
  std::istringstream in(
      "People visiting the clinic get their height measured.\n"
      "normal\n"
      "body height\n"
      "m\n"
      "1.8\n"
      "0.1\n"
      "medium\n");
  std::ostringstream out;
  const ExerciseSpec spec = cli::guided_dialog(in, out, {}, 1);
  CHECK(spec.etype() == ExerciseType::Normal);
  CHECK(out.str().find("trials n") == std::string::npos);
  CHECK(out.str().find("Target count") == std::string::npos);
}

TEST_CASE("guided dialog keeps asking until sigma is positive") {
  std::istringstream in(
      "People visiting the clinic get their height measured.\n"
      "normal\n"
      "body height\n"
      "m\n"
      "1.8\n"
      "0\n"
      "0.1\n"
      "easy\n");
  std::ostringstream out;
  const ExerciseSpec spec = cli::guided_dialog(in, out, {}, 1);
  CHECK(out.str().find("NonPositiveStdDev") != std::string::npos);
  CHECK(std::get<NormalParams>(spec.params).std_dev == doctest::Approx(0.1));
}

TEST_CASE("guided dialog aborts when input ends") {
  std::istringstream in("");
  std::ostringstream out;
  CHECK_THROWS_AS((void)cli::guided_dialog(in, out, {}, 1), Error);
}

TEST_CASE("flag path and dialog path produce the same exercise") {
  auto flags_args = kFullFlags;
  flags_args.push_back("--out");
  flags_args.push_back("cli_flags.txt");
  CHECK(run_cli(flags_args, "") == cli::kExitAccepted);

  const std::vector<std::string> dialog_args = {"generate", "--seed", "42",
                                                "--backend", "stub", "--out", "cli_dialog.txt"};
  const std::string dialog_input =
      "Berlin is the German city with the most traffic lights per capita.\n"
      "binomial\n"
      "traffic light\n"
      "red\n"
      "green\n"
      "0.55\n"
      "8\n"
      "5\n"
      "hard\n";
  CHECK(run_cli(dialog_args, dialog_input) == cli::kExitAccepted);

  CHECK(slurp("cli_flags.txt") == slurp("cli_dialog.txt"));
  std::remove("cli_flags.txt");
  std::remove("cli_dialog.txt");
}

TEST_CASE("generation output is deterministic across runs") {
  auto args = kFullFlags;
  args.push_back("--out");
  args.push_back("cli_det_a.txt");
  CHECK(run_cli(args, "") == cli::kExitAccepted);
  args.back() = "cli_det_b.txt";
  CHECK(run_cli(args, "") == cli::kExitAccepted);
  CHECK(slurp("cli_det_a.txt") == slurp("cli_det_b.txt"));
  std::remove("cli_det_a.txt");
  std::remove("cli_det_b.txt");
}

TEST_CASE("count fans out to derived seeds seed+i") {
  auto args = kFullFlags;
  args.insert(args.end(), {"--count", "3", "--out", "cli_batch.txt"});
  CHECK(run_cli(args, "") == cli::kExitAccepted);

  // each file matches a single run with the corresponding seed
  for (unsigned i = 0; i < 3; ++i) {
    auto single = kFullFlags;
    single[18] = std::to_string(42 + i);  // --seed value position
    single.push_back("--out");
    single.push_back("cli_single.txt");
    CHECK(run_cli(single, "") == cli::kExitAccepted);
    char batch_name[32];
    std::snprintf(batch_name, sizeof(batch_name), "cli_batch_%04u.txt", i);
    CHECK(slurp(batch_name) == slurp("cli_single.txt"));
    std::remove(batch_name);
  }
  std::remove("cli_single.txt");
}

TEST_CASE("structured output carries the envelope with the exercise document") {
  auto args = kFullFlags;
  args.insert(args.end(), {"--format", "structured", "--out", "cli_structured.json"});
  CHECK(run_cli(args, "") == cli::kExitAccepted);
  const auto doc = nlohmann::json::parse(slurp("cli_structured.json"));
  CHECK(doc.at("verdict") == "accept");
  CHECK(doc.at("attempts").get<unsigned>() >= 1);
  REQUIRE(doc.contains("exercise"));
  CHECK(doc.at("exercise").at("constituents").size() ==
        doc.at("exercise").at("arrangement").size());
  CHECK_FALSE(doc.at("reports").empty());
  std::remove("cli_structured.json");
}

TEST_CASE("text output keeps the paragraph, blank line, questions layout") {
  std::string out;
  CHECK(run_cli(kFullFlags, "", &out) == cli::kExitAccepted);
  const auto blank = out.find("\n\n");
  REQUIRE(blank != std::string::npos);
  CHECK(out.substr(0, blank).find("Berlin is the German city") == 0);
  // at least one question line after the blank, ending in a terminator
  const std::string tail = out.substr(blank + 2);
  CHECK(tail.find("traffic lights") != std::string::npos);
  CHECK((tail.find('?') != std::string::npos || tail.find('.') != std::string::npos));
}

TEST_CASE("invalid flag values exit with the validation code") {
  auto args = kFullFlags;
  args[10] = "1.10";  // --p value
  std::string err;
  CHECK(run_cli(args, "", nullptr, &err) == cli::kExitValidation);
  CHECK(err.find("ProbabilityOutOfRange") != std::string::npos);
}

TEST_CASE("missing neural endpoints exit with the backend code") {
  auto args = kFullFlags;
  args[20] = "neural";  // --backend value
  std::string err;
  CHECK(run_cli(args, "", nullptr, &err) == cli::kExitBackendUnavailable);
}

TEST_CASE("config parse failures exit with the config code") {
  std::string err;
  CHECK(run_cli({"evaluate", "--config", "no_such_config.json"}, "", nullptr, &err) ==
        cli::kExitConfigParse);

  {
    std::ofstream bad("cli_bad_config.json");
    bad << "{ definitely not json";
  }
  CHECK(run_cli({"evaluate", "--config", "cli_bad_config.json"}, "", nullptr, &err) ==
        cli::kExitConfigParse);
  std::remove("cli_bad_config.json");

  {
    std::ofstream cfg("cli_bad_key.json");
    cfg << R"({"base": {}, "axes": {"warp_factor": [1, 2, 3]}})";
  }
  CHECK(run_cli({"evaluate", "--config", "cli_bad_key.json"}, "", nullptr, &err) ==
        cli::kExitConfigParse);
  CHECK(err.find("warp_factor") != std::string::npos);
  std::remove("cli_bad_key.json");
}

TEST_CASE("budget exhaustion exits with code three and persists the rejection") {
  // nucleus 0.25 restricts the stub to a prefix whose only markers are
  // conflicts; find a seed that rejects under a one-attempt budget.
  StubInfillBackend stub;
  oracle::MarkerNli nli{StubInfillBackend::kConflictMarker};
  oracle::MarkerNsp nsp{StubInfillBackend::kIncoherenceMarker};
  oracle::TableEmbedding emb;
  Backends backends{stub, nli, nsp, emb};
  GenerationConfig config;
  config.infill.nucleus = 0.25;
  config.budget = {1, 0};

  std::uint64_t rejecting_seed = 0;
  bool found = false;
  for (std::uint64_t seed = 0; seed < 200 && !found; ++seed) {
    ExerciseSpec spec;
    spec.prompt = "Berlin is the German city with the most traffic lights per capita.";
    spec.params = BinomialParams{0.55, "traffic light", {"red", "green"}, 8, 5};
    spec.hardness = HardnessLevel::Easy;
    spec.seed = seed;
    if (!generate_exercise(spec, backends, config).accepted()) {
      rejecting_seed = seed;
      found = true;
    }
  }
  REQUIRE(found);

  std::vector<std::string> args = {
      "generate", "--prompt",
      "Berlin is the German city with the most traffic lights per capita.",
      "--type", "binomial", "--noun", "traffic light", "--labels", "red,green",
      "--p", "0.55", "--n", "8", "--k", "5", "--hardness", "easy",
      "--seed", std::to_string(rejecting_seed), "--backend", "stub",
      "--nucleus", "0.25", "--max-attempts", "1", "--retries", "0",
      "--out", "cli_rejected.json"};
  std::string err;
  CHECK(run_cli(args, "", nullptr, &err) == cli::kExitBudgetExhausted);

  const auto doc = nlohmann::json::parse(slurp("cli_rejected.json"));
  CHECK(doc.at("verdict") == "reject_conflict");
  CHECK(doc.at("exercise").is_null());
  CHECK_FALSE(doc.at("reports").empty());
  std::remove("cli_rejected.json");
}

TEST_CASE("ablate subcommand writes the results file") {
  {
    std::ofstream cfg("cli_ablation.json");
    cfg << R"({"nucleus": 1.0, "per_config_count": 10})";
  }
  std::string out;
  std::string err;
  const int code = run_cli({"ablate", "--config", "cli_ablation.json", "--fixed-seeds",
                            "--max-attempts", "1", "--retries", "0", "--out",
                            "cli_ablation_results.csv"},
                           "", &out, &err);
  CHECK(code == cli::kExitAccepted);
  const std::string csv = slurp("cli_ablation_results.csv");
  CHECK(csv.find("ablation,hardness,nucleus") == 0);
  // 18 cells x 5 metrics + header
  std::size_t lines = 0;
  for (char c : csv) {
    if (c == '\n') ++lines;
  }
  CHECK(lines == 1 + 18 * 5);
  std::remove("cli_ablation.json");
  std::remove("cli_ablation_results.csv");
}

TEST_CASE("evaluate subcommand runs a small grid and prints correlations") {
  {
    std::ofstream cfg("cli_grid.json");
    cfg << R"({
      "base": {"hardness": "easy", "nucleus": 1.0, "per_config_count": 40},
      "axes": {"nucleus": [0.3, 0.6, 1.0]}
    })";
  }
  std::string out;
  std::string err;
  const int code = run_cli({"evaluate", "--config", "cli_grid.json", "--fixed-seeds",
                            "--max-attempts", "1", "--retries", "0"},
                           "", &out, &err);
  CHECK(code == cli::kExitAccepted);
  CHECK(out.find("ablation,hardness,nucleus") != std::string::npos);
  CHECK(out.find("# correlations (nucleus)") != std::string::npos);
  std::remove("cli_grid.json");
}

TEST_CASE("help exits cleanly") {
  std::string out;
  CHECK(run_cli({"--help"}, "", &out) == cli::kExitAccepted);
  CHECK(out.find("generate") != std::string::npos);
}
