#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "wpgen/model.hpp"

namespace wpgen::cli {

// Exit codes shared by all subcommands.
inline constexpr int kExitAccepted = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitBudgetExhausted = 3;
inline constexpr int kExitBackendUnavailable = 4;
inline constexpr int kExitConfigParse = 5;

// Pieces of an ExerciseSpec already fixed by flags; the dialog only asks for
// what is missing.
struct SpecDraft {
  std::optional<std::string> prompt;
  std::optional<ExerciseType> etype;
  std::optional<std::string> noun;
  std::optional<std::string> success_label;
  std::optional<std::string> failure_label;
  std::optional<double> probability;
  std::optional<unsigned> trials_n;
  std::optional<unsigned> target_k;
  std::optional<double> mean;
  std::optional<double> std_dev;
  std::optional<std::string> unit;
  std::optional<HardnessLevel> hardness;

  bool complete() const;
  ExerciseSpec resolve(std::uint64_t seed) const;  // throws on missing fields
};

// Interactive one-shot dialog: requests the missing fields depending on the
// exercise type and re-prompts on each validation failure, naming the
// violated rule. Throws Error(Aborted) when input ends.
ExerciseSpec guided_dialog(std::istream& in, std::ostream& out, SpecDraft draft = {},
                           std::uint64_t seed = 0);

// Entry point used by the wpgen binary and the tests.
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace wpgen::cli
