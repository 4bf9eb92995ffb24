#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wpgen/model.hpp"

namespace wpgen {

struct InfillQuery {
  std::string left_context;
  std::string right_context;
  double nucleus = 0.5;
  double temperature = 1.0;  // consumed by sampling backends; the stub ignores it
  unsigned max_new_tokens = 40;
  std::uint64_t seed = 0;

  // Throws InvalidConfig when both contexts are empty, nucleus is outside
  // (0, 1], or temperature is not positive.
  void validate() const;
};

// Sampling knobs shared by every infill drawn for one exercise.
struct InfillSettings {
  double nucleus = 0.5;
  double temperature = 1.0;
  unsigned max_new_tokens = 40;
};

enum class SegmentKind { LeftContext, Mask, RightContext, Separator };

struct LayoutSegment {
  SegmentKind kind;
  std::string text;  // empty for mask and separator

  bool operator==(const LayoutSegment&) const = default;
};

// Token layout consumed by causal-LM backends: left sentences, one mask,
// right sentences, one separator; the answer is generated after the
// separator.
struct InfillLayout {
  std::vector<LayoutSegment> segments;
  std::size_t mask_index = 0;
  std::size_t separator_index = 0;
  std::size_t generation_start() const { return segments.size(); }
};

InfillLayout format_infill_query(const InfillQuery& query);

class InfillBackend {
 public:
  virtual ~InfillBackend() = default;

  // Raw model text for the query. May run past one sentence; the caller
  // truncates. Throws BackendUnavailable when the backend cannot serve.
  virtual std::string raw_generate(const InfillQuery& query) = 0;

  virtual std::string name() const = 0;
};

// Runs the backend and enforces the single-sentence contract: the output is
// cut at the first terminal punctuation mark followed by whitespace or end
// of text, and the remainder is discarded. Throws DegenerateOutput when no
// terminator appears; callers treat that as a failed candidate and retry.
Constituent generate_infill(const InfillQuery& query, InfillBackend& backend);

// Deterministic backend over a fixed ten-sentence pool, for tests and
// model-free runs. The draw honours the nucleus parameter: the pool stands
// in for a probability-ranked vocabulary, and a draw is uniform over the
// smallest prefix whose cumulative (uniform) mass exceeds the nucleus.
//
// Two pool sentences contain kConflictMarker and one contains
// kIncoherenceMarker, so oracle scorers can be keyed to reject a known
// fraction of draws (0.2 and 0.1 respectively at nucleus 1.0).
class StubInfillBackend : public InfillBackend {
 public:
  struct Options {
    bool echo_left_keyword = false;  // append a keyword lifted from the left context
    std::uint64_t salt = 0;
  };

  StubInfillBackend() = default;
  explicit StubInfillBackend(Options options) : options_(options) {}

  static const std::vector<std::string>& pool();
  static constexpr const char* kConflictMarker = "contrary to";
  static constexpr const char* kIncoherenceMarker = "on the moon";

  std::string raw_generate(const InfillQuery& query) override;
  std::string name() const override { return "stub"; }

 private:
  Options options_;
};

}  // namespace wpgen
