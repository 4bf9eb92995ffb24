#include "wpgen/infill.hpp"

#include <algorithm>
#include <cmath>

#include "wpgen/rng.hpp"
#include "wpgen/text.hpp"

namespace wpgen {

void InfillQuery::validate() const {
  if (text::trim(left_context).empty() && text::trim(right_context).empty()) {
    throw Error(Errc::InvalidConfig, "infill query needs left or right context");
  }
  if (!(nucleus > 0.0 && nucleus <= 1.0)) {
    throw Error(Errc::InvalidConfig, "nucleus must lie in (0, 1]");
  }
  if (!(temperature > 0.0)) {
    throw Error(Errc::InvalidConfig, "temperature must be positive");
  }
  if (max_new_tokens == 0) {
    throw Error(Errc::InvalidConfig, "max_new_tokens must be positive");
  }
}

InfillLayout format_infill_query(const InfillQuery& query) {
  query.validate();
  InfillLayout layout;
  for (const std::string& s : text::split_sentences(query.left_context)) {
    layout.segments.push_back({SegmentKind::LeftContext, s});
  }
  layout.mask_index = layout.segments.size();
  layout.segments.push_back({SegmentKind::Mask, ""});
  for (const std::string& s : text::split_sentences(query.right_context)) {
    layout.segments.push_back({SegmentKind::RightContext, s});
  }
  layout.separator_index = layout.segments.size();
  layout.segments.push_back({SegmentKind::Separator, ""});
  return layout;
}

Constituent generate_infill(const InfillQuery& query, InfillBackend& backend) {
  query.validate();
  const std::string raw = backend.raw_generate(query);
  const auto sentence = text::first_sentence(raw);
  if (!sentence.has_value() || sentence->empty()) {
    throw Error(Errc::DegenerateOutput,
                "backend '" + backend.name() + "' produced no sentence terminator");
  }
  return {ConstituentKind::Infill, *sentence, 0, Provenance::UnconstrainedNLM};
}

const std::vector<std::string>& StubInfillBackend::pool() {
  // Order matters: a nucleus draw restricts to a prefix of this list.
  // Conflict markers sit at positions 2 and 7, the incoherence marker at 4,
  // so a full-pool draw is conflict-marked with probability exactly 0.2.
  static const std::vector<std::string> sentences = {
      "This setting is quite common in everyday life.",
      "Many people encounter this situation regularly.",
      "Some reports are contrary to these assumptions altogether.",
      "It helps to picture the scenario before doing any math.",
      "Meanwhile, the weather on the moon stays the same as ever.",
      "The following information is useful for the task at hand.",
      "Keep these details in mind as you read on.",
      "Contrary to the stated figures, the true numbers differ wildly.",
      "Such situations can be analyzed with basic probability theory.",
      "The details below describe the situation more precisely.",
  };
  return sentences;
}

std::string StubInfillBackend::raw_generate(const InfillQuery& query) {
  query.validate();
  const auto& sentences = pool();

  // Smallest prefix whose cumulative uniform mass exceeds the nucleus.
  std::size_t prefix = static_cast<std::size_t>(
      std::floor(query.nucleus * static_cast<double>(sentences.size()))) + 1;
  prefix = std::clamp<std::size_t>(prefix, 1, sentences.size());

  SplitRng rng(mix_seed(query.seed, {seed_stream::kStub, options_.salt}));
  std::string out = sentences[rng.below(prefix)];

  if (options_.echo_left_keyword) {
    // Longest word of the left context, stripped of punctuation.
    std::string keyword;
    std::string current;
    for (char c : query.left_context + " ") {
      if (std::isalpha(static_cast<unsigned char>(c))) {
        current += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      } else {
        if (current.size() > keyword.size()) keyword = current;
        current.clear();
      }
    }
    if (!keyword.empty()) {
      out.pop_back();
      out += ", speaking of " + keyword + ".";
    }
  }
  return out;
}

}  // namespace wpgen
