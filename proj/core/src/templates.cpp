#include "wpgen/templates.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wpgen/text.hpp"

namespace wpgen {

const char* to_string(TemplateRole r) {
  switch (r) {
    case TemplateRole::StatementProbability: return "statement_probability";
    case TemplateRole::StatementExclusivity: return "statement_exclusivity";
    case TemplateRole::StatementIndependence: return "statement_independence";
    case TemplateRole::StatementNormality: return "statement_normality";
    case TemplateRole::StatementStdDev: return "statement_std_dev";
    case TemplateRole::StatementMean: return "statement_mean";
    case TemplateRole::Question: return "question";
  }
  return "?";
}

std::optional<TemplateRole> template_role_from_string(const std::string& s) {
  static const std::map<std::string, TemplateRole> table = {
      {"statement_probability", TemplateRole::StatementProbability},
      {"statement_exclusivity", TemplateRole::StatementExclusivity},
      {"statement_independence", TemplateRole::StatementIndependence},
      {"statement_normality", TemplateRole::StatementNormality},
      {"statement_std_dev", TemplateRole::StatementStdDev},
      {"statement_mean", TemplateRole::StatementMean},
      {"question", TemplateRole::Question},
  };
  auto it = table.find(s);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

namespace {

struct PatternPiece {
  bool is_slot = false;
  bool is_alternation = false;
  std::string textual;                    // literal text or slot body
  std::vector<std::string> alternatives;  // for alternations
};

std::vector<PatternPiece> parse_pattern(const std::string& pattern) {
  std::vector<PatternPiece> pieces;
  std::string literal;
  for (std::size_t i = 0; i < pattern.size();) {
    if (pattern[i] != '{') {
      literal += pattern[i++];
      continue;
    }
    const std::size_t close = pattern.find('}', i);
    if (close == std::string::npos) {
      literal += pattern.substr(i);
      break;
    }
    if (!literal.empty()) {
      pieces.push_back({false, false, literal, {}});
      literal.clear();
    }
    const std::string body = pattern.substr(i + 1, close - i - 1);
    i = close + 1;
    if (body.find('|') != std::string::npos) {
      PatternPiece piece;
      piece.is_alternation = true;
      std::size_t start = 0;
      while (true) {
        const std::size_t bar = body.find('|', start);
        piece.alternatives.push_back(body.substr(start, bar - start));
        if (bar == std::string::npos) break;
        start = bar + 1;
      }
      pieces.push_back(std::move(piece));
    } else {
      pieces.push_back({true, false, body, {}});
    }
  }
  if (!literal.empty()) pieces.push_back({false, false, literal, {}});
  return pieces;
}

std::pair<std::string, std::string> split_slot_body(const std::string& body) {
  const std::size_t colon = body.find(':');
  if (colon == std::string::npos) return {body, ""};
  return {body.substr(0, colon), body.substr(colon + 1)};
}

bool vowel_start(const std::string& s) {
  if (s.empty()) return false;
  const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(s.front())));
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

}  // namespace

void Template::validate() const {
  if (text::sentence_count(pattern) != 1 || !text::ends_like_sentence(pattern)) {
    throw Error(Errc::InvalidConfig, "pattern must realize to exactly one sentence: " + pattern);
  }
  for (const PatternPiece& piece : parse_pattern(pattern)) {
    if (!piece.is_slot) continue;
    const auto [name, mod] = split_slot_body(piece.textual);
    if (std::find(required_slots.begin(), required_slots.end(), name) == required_slots.end()) {
      throw Error(Errc::InvalidConfig, "pattern slot '" + name + "' missing from required_slots");
    }
    if (!mod.empty() && mod != "plural" && mod != "singular" && mod != "article" &&
        mod != "Article") {
      throw Error(Errc::InvalidConfig, "unknown slot modifier '" + mod + "'");
    }
  }
  for (const std::string& marker : emphasis_markers) {
    if (!text::icontains(pattern, marker)) {
      throw Error(Errc::InvalidConfig, "emphasis marker '" + marker + "' absent from pattern");
    }
  }
  if (role == TemplateRole::Question && (!hardness.has_value() || !question_kind.has_value())) {
    throw Error(Errc::InvalidConfig, "question templates need hardness and question_kind");
  }
}

Lexicon Lexicon::with_defaults() {
  Lexicon lex;
  lex.add("traffic light", {"traffic light", "traffic lights", "a"});
  lex.add("water consumption", {"water consumption", "water consumption", "the"});
  lex.add("coin", {"coin", "coins", "a"});
  lex.add("die", {"die", "dice", "a"});
  lex.add("day", {"day", "days", "a"});
  lex.add("person", {"person", "people", "a"});
  lex.add("battery", {"battery", "batteries", "a"});
  lex.add("exam", {"exam", "exams", "an"});
  return lex;
}

void Lexicon::add(const std::string& lexeme, LexiconEntry entry) {
  if (entry.singular.empty()) entry.singular = lexeme;
  entries_[lexeme] = std::move(entry);
}

std::string Lexicon::singular(const std::string& lexeme) const {
  auto it = entries_.find(lexeme);
  return it == entries_.end() ? lexeme : it->second.singular;
}

std::string Lexicon::plural(const std::string& lexeme) const {
  auto it = entries_.find(lexeme);
  if (it != entries_.end() && !it->second.plural.empty()) return it->second.plural;
  return singular(lexeme) + "s";
}

std::string Lexicon::article(const std::string& lexeme) const {
  auto it = entries_.find(lexeme);
  if (it != entries_.end() && !it->second.article.empty()) return it->second.article;
  return vowel_start(singular(lexeme)) ? "an" : "a";
}

std::string realize_template(const Template& tpl, const SlotMap& slots, const Lexicon& lexicon,
                             SplitRng& rng) {
  std::string out;
  for (const PatternPiece& piece : parse_pattern(tpl.pattern)) {
    if (piece.is_alternation) {
      out += piece.alternatives[rng.below(piece.alternatives.size())];
      continue;
    }
    if (!piece.is_slot) {
      out += piece.textual;
      continue;
    }
    const auto [name, mod] = split_slot_body(piece.textual);
    const auto it = slots.find(name);
    if (it == slots.end()) {
      throw Error(Errc::UnboundSlot, "slot '" + name + "' not bound for: " + tpl.pattern);
    }
    const SlotValue& sv = it->second;
    std::string rendered;
    if (!sv.is_lexeme) {
      rendered = sv.value;
      if (mod == "article" || mod == "Article") {
        rendered = (vowel_start(rendered) ? "an " : "a ") + rendered;
      }
    } else if (mod == "plural") {
      rendered = lexicon.plural(sv.value);
    } else if (mod == "singular") {
      rendered = lexicon.singular(sv.value);
    } else if (mod == "article" || mod == "Article") {
      rendered = lexicon.article(sv.value) + " " + lexicon.singular(sv.value);
    } else {
      const bool singular_count = std::fabs(sv.count - 1.0) < 1e-9;
      rendered = singular_count ? lexicon.singular(sv.value) : lexicon.plural(sv.value);
    }
    if (mod == "Article") rendered = text::capitalize_first(rendered);
    out += rendered;
  }
  return out;
}

void TemplateInventory::add(Template tpl) {
  tpl.validate();
  templates_.push_back(std::move(tpl));
}

std::vector<const Template*> TemplateInventory::statements(ExerciseType etype,
                                                           TemplateRole role) const {
  std::vector<const Template*> out;
  for (const Template& t : templates_) {
    if (t.etype == etype && t.role == role) out.push_back(&t);
  }
  return out;
}

std::vector<const Template*> TemplateInventory::questions(ExerciseType etype) const {
  std::vector<const Template*> out;
  for (const Template& t : templates_) {
    if (t.etype == etype && t.role == TemplateRole::Question) out.push_back(&t);
  }
  return out;
}

namespace {

const TemplateInventory& default_inventory() {
  static const TemplateInventory inv = TemplateInventory::builtin();
  return inv;
}

const Lexicon& default_lexicon() {
  static const Lexicon lex = Lexicon::with_defaults();
  return lex;
}

SlotMap statement_slots(const ExerciseSpec& spec) {
  SlotMap slots;
  if (const auto* b = std::get_if<BinomialParams>(&spec.params)) {
    slots["noun"] = SlotValue::lexeme(b->trial_noun);
    slots["label"] = SlotValue::literal(b->outcome_labels.first);
    slots["label_a"] = SlotValue::literal(b->outcome_labels.first);
    slots["label_b"] = SlotValue::literal(b->outcome_labels.second);
    slots["p"] = SlotValue::literal(text::format_percent(b->success_probability));
  } else {
    const auto& g = std::get<NormalParams>(spec.params);
    const std::string unit_suffix = g.unit.empty() ? "" : " " + g.unit;
    slots["noun"] = SlotValue::lexeme(g.quantity_noun);
    slots["sigma"] = SlotValue::literal(text::format_fixed1(g.std_dev) + unit_suffix);
    slots["mu"] = SlotValue::literal(text::format_minimal(g.mean) + unit_suffix);
    slots["mu_approx"] = SlotValue::literal("~" + text::format_minimal(g.mean) + unit_suffix);
  }
  return slots;
}

}  // namespace

StatementBundle generate_statements(const ExerciseSpec& spec, const TemplateInventory& inventory,
                                    const Lexicon& lexicon, SplitRng& rng) {
  const SlotMap slots = statement_slots(spec);
  const bool binomial = spec.etype() == ExerciseType::Binomial;
  const std::vector<TemplateRole> roles =
      binomial ? std::vector<TemplateRole>{TemplateRole::StatementProbability,
                                           TemplateRole::StatementExclusivity,
                                           TemplateRole::StatementIndependence}
               : std::vector<TemplateRole>{TemplateRole::StatementNormality,
                                           TemplateRole::StatementStdDev,
                                           TemplateRole::StatementMean};

  std::vector<std::string> texts;
  for (TemplateRole role : roles) {
    const auto variants = inventory.statements(spec.etype(), role);
    if (variants.empty()) {
      throw Error(Errc::MissingTemplate, std::string("no template for role ") + to_string(role));
    }
    const Template* tpl = variants[rng.below(variants.size())];
    texts.push_back(realize_template(*tpl, slots, lexicon, rng));
  }
  rng.shuffle(texts);  // "the order of statements is varied"

  StatementBundle bundle;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    bundle.statements.push_back({ConstituentKind::Statement, texts[i], static_cast<unsigned>(i),
                                 Provenance::ConstrainedTemplate});
  }
  bundle.facts.params = spec.params;
  bundle.facts.exclusive_outcomes = binomial;
  bundle.facts.independent_trials = binomial;
  bundle.facts.normality_assumed = !binomial;
  return bundle;
}

StatementBundle generate_statements(const ExerciseSpec& spec, SplitRng& rng) {
  return generate_statements(spec, default_inventory(), default_lexicon(), rng);
}

std::vector<QuestionPoolEntry> build_questionpool(const ExerciseSpec& spec,
                                                  const TemplateInventory& inventory,
                                                  const Lexicon& lexicon) {
  // No free randomness here: alternations draw from a stream derived from
  // the spec seed, so the pool is a pure function of the spec.
  SplitRng rng(mix_seed(spec.seed, {seed_stream::kQuestionPool}));

  std::vector<QuestionPoolEntry> pool;
  for (const Template* tpl : inventory.questions(spec.etype())) {
    AnswerKey key;
    key.kind = *tpl->question_kind;
    SlotMap slots = statement_slots(spec);

    if (const auto* b = std::get_if<BinomialParams>(&spec.params)) {
      // Operands are materialized as literals so each entry is self-contained.
      key.k = static_cast<double>(b->target_count_k);
      key.n = static_cast<double>(b->trial_count_n);
      if (tpl->operand_profile == "single") {
        key.k = 1.0;
        key.n = 1.0;
      } else if (tpl->operand_profile == "tail") {
        key.k = static_cast<double>(b->trial_count_n) - 1.0;
      } else if (tpl->operand_profile != "spec") {
        throw Error(Errc::InvalidConfig, "unknown operand profile " + tpl->operand_profile);
      }
      if (key.kind == AnswerKeyKind::BinomialMean) key.k.reset();
      slots["k"] = SlotValue::literal(text::format_minimal(key.k.value_or(0.0)));
      slots["n"] = SlotValue::literal(text::format_minimal(*key.n));
      slots["noun"] = SlotValue::lexeme(b->trial_noun, *key.n);
    } else {
      const auto& g = std::get<NormalParams>(spec.params);
      const std::string unit_suffix = g.unit.empty() ? "" : " " + g.unit;
      auto bound_text = [&](double x) { return text::format_minimal(x) + unit_suffix; };
      if (tpl->operand_profile == "above_hi") {
        key.lower = g.mean + g.std_dev;
        slots["x"] = SlotValue::literal(bound_text(*key.lower));
      } else if (tpl->operand_profile == "above_lo") {
        key.lower = g.mean - g.std_dev;
        slots["x"] = SlotValue::literal(bound_text(*key.lower));
      } else if (tpl->operand_profile == "between_1" || tpl->operand_profile == "between_2") {
        const double width = tpl->operand_profile == "between_1" ? 1.0 : 2.0;
        key.lower = g.mean - width * g.std_dev;
        key.upper = g.mean + width * g.std_dev;
        slots["a"] = SlotValue::literal(bound_text(*key.lower));
        slots["b"] = SlotValue::literal(bound_text(*key.upper));
      } else if (tpl->operand_profile != "spec") {
        throw Error(Errc::InvalidConfig, "unknown operand profile " + tpl->operand_profile);
      }
    }

    pool.push_back({realize_template(*tpl, slots, lexicon, rng), *tpl->hardness, key});
  }

  std::size_t per_level[3] = {0, 0, 0};
  for (const auto& entry : pool) per_level[static_cast<int>(entry.hardness)]++;
  for (int level = 0; level < 3; ++level) {
    if (per_level[level] < 2) {
      throw Error(Errc::MissingTemplate,
                  std::string("question pool needs at least two entries at level ") +
                      to_string(static_cast<HardnessLevel>(level)));
    }
  }
  return pool;
}

std::vector<QuestionPoolEntry> build_questionpool(const ExerciseSpec& spec) {
  return build_questionpool(spec, default_inventory(), default_lexicon());
}

QuestionProfile question_profile(HardnessLevel h) {
  switch (h) {
    case HardnessLevel::Easy: return {1, HardnessLevel::Medium, false};
    case HardnessLevel::Medium: return {2, HardnessLevel::Medium, false};
    case HardnessLevel::Hard: return {3, HardnessLevel::Hard, true};
  }
  return {1, HardnessLevel::Medium, false};
}

std::vector<QuestionPoolEntry> sample_questions(const std::vector<QuestionPoolEntry>& pool,
                                                HardnessLevel hardness, SplitRng& rng) {
  const QuestionProfile profile = question_profile(hardness);

  // Group eligible entries by answer key, so one draw never yields two
  // wordings of the same question.
  std::vector<std::pair<AnswerKey, std::vector<std::size_t>>> groups;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (pool[i].hardness > profile.max_level) continue;
    const AnswerKey& id = pool[i].answer_key;
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& g) { return g.first == id; });
    if (it == groups.end()) {
      groups.push_back({id, {i}});
    } else {
      it->second.push_back(i);
    }
  }

  std::vector<std::size_t> picked;
  auto pick_from_group = [&](const std::vector<std::size_t>& members,
                             std::optional<HardnessLevel> want_level) {
    std::vector<std::size_t> candidates;
    for (std::size_t idx : members) {
      if (!want_level.has_value() || pool[idx].hardness == *want_level) candidates.push_back(idx);
    }
    picked.push_back(candidates[rng.below(candidates.size())]);
  };

  std::vector<std::size_t> group_ids(groups.size());
  std::iota(group_ids.begin(), group_ids.end(), 0);

  std::size_t need = profile.count;
  if (profile.require_hard) {
    std::vector<std::size_t> hard_groups;
    for (std::size_t g : group_ids) {
      const bool has_hard = std::any_of(groups[g].second.begin(), groups[g].second.end(),
                                        [&](std::size_t idx) {
                                          return pool[idx].hardness == HardnessLevel::Hard;
                                        });
      if (has_hard) hard_groups.push_back(g);
    }
    if (hard_groups.empty()) {
      throw Error(Errc::InsufficientPool, "no hard question available");
    }
    const std::size_t chosen = hard_groups[rng.below(hard_groups.size())];
    pick_from_group(groups[chosen].second, HardnessLevel::Hard);
    group_ids.erase(std::find(group_ids.begin(), group_ids.end(), chosen));
    --need;
  }
  if (group_ids.size() < need) {
    throw Error(Errc::InsufficientPool, "pool cannot satisfy the question profile");
  }
  for (std::size_t draw = 0; draw < need; ++draw) {
    const std::size_t pos = rng.below(group_ids.size());
    pick_from_group(groups[group_ids[pos]].second, std::nullopt);
    group_ids.erase(group_ids.begin() + static_cast<std::ptrdiff_t>(pos));
  }

  std::sort(picked.begin(), picked.end());  // stable tie order by pool position
  std::vector<QuestionPoolEntry> out;
  for (std::size_t idx : picked) out.push_back(pool[idx]);
  std::stable_sort(out.begin(), out.end(),
                   [](const QuestionPoolEntry& a, const QuestionPoolEntry& b) {
                     return a.hardness < b.hardness;
                   });
  return out;
}

}  // namespace wpgen
