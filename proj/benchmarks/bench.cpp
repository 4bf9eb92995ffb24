#include <benchmark/benchmark.h>

#include "wpgen/checkers.hpp"
#include "wpgen/controller.hpp"
#include "wpgen/serialize.hpp"
#include "wpgen/templates.hpp"

using namespace wpgen;

namespace {

ExerciseSpec bench_spec(HardnessLevel h) {
  ExerciseSpec spec;
  spec.prompt = "Berlin is the German city with the most traffic lights per capita.";
  spec.params = BinomialParams{0.55, "traffic light", {"red", "green"}, 8, 5};
  spec.hardness = h;
  spec.seed = 1;
  return spec;
}

void ArrangementSampling(benchmark::State& state) {
  const ControllerProfile profile =
      hardness_profile(static_cast<HardnessLevel>(state.range(0)));
  SplitRng rng(7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(get_arrangement(profile, 3, rng));
  }
}
BENCHMARK(ArrangementSampling)->Arg(0)->Arg(1)->Arg(2);

void ConflictCheck(benchmark::State& state) {
  oracle::TableNli nli;
  const CheckerConfig cfg{};
  std::vector<std::string> statements;
  std::vector<std::string> candidates;
  for (int i = 0; i < 3; ++i) statements.push_back("Statement " + std::to_string(i) + ".");
  for (long i = 0; i < state.range(0); ++i) {
    candidates.push_back("Candidate " + std::to_string(i) + ".");
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(check_constraint_conflicts(statements, candidates, nli, cfg));
  }
}
BENCHMARK(ConflictCheck)->Arg(3)->Arg(9);

void StatementGeneration(benchmark::State& state) {
  const ExerciseSpec spec = bench_spec(HardnessLevel::Medium);
  SplitRng rng(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_statements(spec, rng));
  }
}
BENCHMARK(StatementGeneration);

void EndToEndGeneration(benchmark::State& state) {
  StubInfillBackend stub;
  oracle::MarkerNli nli{StubInfillBackend::kConflictMarker};
  oracle::MarkerNsp nsp{StubInfillBackend::kIncoherenceMarker};
  oracle::TableEmbedding emb;
  Backends backends{stub, nli, nsp, emb};
  GenerationConfig config;
  config.infill.nucleus = 1.0;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    ExerciseSpec spec = bench_spec(static_cast<HardnessLevel>(state.range(0)));
    spec.seed = seed++;
    benchmark::DoNotOptimize(generate_exercise(spec, backends, config));
  }
}
BENCHMARK(EndToEndGeneration)->Arg(0)->Arg(1)->Arg(2);

void SerializeRoundTrip(benchmark::State& state) {
  StubInfillBackend stub;
  oracle::TableNli nli;
  oracle::TableNsp nsp;
  oracle::TableEmbedding emb;
  Backends backends{stub, nli, nsp, emb};
  const GenerationResult result = generate_exercise(bench_spec(HardnessLevel::Hard), backends);
  const Exercise& ex = *result.exercise;
  for (auto _ : state) {
    benchmark::DoNotOptimize(deserialize_exercise(serialize_exercise(ex)));
  }
}
BENCHMARK(SerializeRoundTrip);

}  // namespace

BENCHMARK_MAIN();
