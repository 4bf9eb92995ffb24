#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <set>

#include "doctest.h"
#include "wpgen/infill.hpp"
#include "wpgen/text.hpp"

using namespace wpgen;

namespace {

struct FixedBackend : InfillBackend {
  std::string output;
  explicit FixedBackend(std::string s) : output(std::move(s)) {}
  std::string raw_generate(const InfillQuery&) override { return output; }
  std::string name() const override { return "fixed"; }
};

InfillQuery query(std::string left, std::string right, double nucleus = 0.5,
                  std::uint64_t seed = 0) {
  InfillQuery q;
  q.left_context = std::move(left);
  q.right_context = std::move(right);
  q.nucleus = nucleus;
  q.seed = seed;
  return q;
}

}  // namespace

TEST_CASE("layout places one mask between the contexts and one separator") {
  const InfillLayout layout = format_infill_query(query("A.", "B."));
  REQUIRE(layout.segments.size() == 4);
  CHECK(layout.segments[0].kind == SegmentKind::LeftContext);
  CHECK(layout.segments[0].text == "A.");
  CHECK(layout.segments[1].kind == SegmentKind::Mask);
  CHECK(layout.segments[2].kind == SegmentKind::RightContext);
  CHECK(layout.segments[2].text == "B.");
  CHECK(layout.segments[3].kind == SegmentKind::Separator);
  CHECK(layout.mask_index == 1);
  CHECK(layout.separator_index == 3);
  CHECK(layout.generation_start() == 4);
}

TEST_CASE("layout handles an empty left context") {
  const InfillLayout layout = format_infill_query(query("", "B."));
  REQUIRE(layout.segments.size() == 3);
  CHECK(layout.segments[0].kind == SegmentKind::Mask);
  CHECK(layout.segments[1].kind == SegmentKind::RightContext);
  CHECK(layout.segments[2].kind == SegmentKind::Separator);
  CHECK(layout.mask_index == 0);
}

TEST_CASE("layout length is left sentences plus right sentences plus two") {
  const InfillLayout layout = format_infill_query(query("One. Two. Three.", "Four. Five."));
  CHECK(layout.segments.size() == 3 + 2 + 2);
  std::size_t masks = 0;
  std::size_t separators = 0;
  for (const auto& seg : layout.segments) {
    if (seg.kind == SegmentKind::Mask) ++masks;
    if (seg.kind == SegmentKind::Separator) ++separators;
  }
  CHECK(masks == 1);
  CHECK(separators == 1);
}

TEST_CASE("query validation") {
  CHECK_THROWS_AS((void)format_infill_query(query("", "")), Error);
  CHECK_THROWS_AS((void)format_infill_query(query("A.", "B.", 0.0)), Error);
  CHECK_THROWS_AS((void)format_infill_query(query("A.", "B.", 1.5)), Error);
  InfillQuery cold = query("A.", "B.");
  cold.temperature = 0.0;
  CHECK_THROWS_AS(cold.validate(), Error);
}

TEST_CASE("generate_infill returns a single tagged sentence") {
  StubInfillBackend stub;
  const Constituent c = generate_infill(query("Left context here.", "Right side.", 1.0, 3), stub);
  CHECK(c.kind == ConstituentKind::Infill);
  CHECK(c.provenance == Provenance::UnconstrainedNLM);
  CHECK(text::sentence_count(c.text) == 1);
  CHECK(text::ends_like_sentence(c.text));
}

TEST_CASE("generate_infill truncates at the first sentence terminator") {
  FixedBackend chatty("First sentence. Second sentence. Third.");
  const Constituent c = generate_infill(query("A.", "B."), chatty);
  CHECK(c.text == "First sentence.");
}

TEST_CASE("generate_infill flags terminator-free output as degenerate") {
  FixedBackend rambling("no terminator in sight and none coming");
  CHECK_THROWS_AS((void)generate_infill(query("A.", "B."), rambling), Error);
  try {
    (void)generate_infill(query("A.", "B."), rambling);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DegenerateOutput);
  }
}

TEST_CASE("stub backend is deterministic per seed") {
  StubInfillBackend stub;
  const auto q = query("Some left text.", "Some right text.", 0.8, 1234);
  CHECK(generate_infill(q, stub).text == generate_infill(q, stub).text);

  StubInfillBackend stub2;
  CHECK(generate_infill(q, stub2).text == generate_infill(q, stub).text);
}

TEST_CASE("stub outputs stay inside the documented pool") {
  StubInfillBackend stub;
  const auto& pool = StubInfillBackend::pool();
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const Constituent c = generate_infill(query("Left.", "Right.", 1.0, seed), stub);
    CHECK(std::find(pool.begin(), pool.end(), c.text) != pool.end());
  }
}

TEST_CASE("distinct outputs shrink monotonically as the nucleus tightens") {
  StubInfillBackend stub;
  std::size_t previous = StubInfillBackend::pool().size() + 1;
  for (double nucleus : {1.0, 0.7, 0.5, 0.2, 0.05}) {
    std::set<std::string> distinct;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      distinct.insert(generate_infill(query("Left.", "Right.", nucleus, seed), stub).text);
    }
    CHECK(distinct.size() <= previous);
    previous = distinct.size();
  }
  // the tightest nucleus pins the draw to the head of the pool
  StubInfillBackend stub2;
  CHECK(generate_infill(query("Left.", "Right.", 0.05, 99), stub2).text ==
        StubInfillBackend::pool().front());
}

TEST_CASE("full-pool draws are conflict-marked a fifth of the time") {
  StubInfillBackend stub;
  int marked = 0;
  const int runs = 10000;
  for (int seed = 0; seed < runs; ++seed) {
    const auto c = generate_infill(query("Left.", "Right.", 1.0, seed), stub);
    if (text::icontains(c.text, StubInfillBackend::kConflictMarker)) ++marked;
  }
  const double fraction = static_cast<double>(marked) / runs;
  CHECK(fraction > 0.2 - 0.015);  // ~3.75 binomial sigma
  CHECK(fraction < 0.2 + 0.015);
}

TEST_CASE("keyword echo stays a single sentence and mentions the keyword") {
  StubInfillBackend echo({true, 0});
  const Constituent c =
      generate_infill(query("The observatory tracks meteors nightly.", "Right.", 1.0, 5), echo);
  CHECK(text::sentence_count(c.text) == 1);
  CHECK(text::icontains(c.text, "observatory"));
}

TEST_CASE("pool markers sit where the funnel tests expect them") {
  const auto& pool = StubInfillBackend::pool();
  REQUIRE(pool.size() == 10);
  int conflict_marked = 0;
  int incoherence_marked = 0;
  for (const auto& s : pool) {
    if (text::icontains(s, StubInfillBackend::kConflictMarker)) ++conflict_marked;
    if (text::icontains(s, StubInfillBackend::kIncoherenceMarker)) ++incoherence_marked;
  }
  CHECK(conflict_marked == 2);
  CHECK(incoherence_marked == 1);
}
