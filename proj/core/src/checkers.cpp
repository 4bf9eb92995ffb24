#include "wpgen/checkers.hpp"

#include <cmath>

#include "wpgen/text.hpp"

namespace wpgen {

bool NliScores::valid(double tol) const {
  auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  return in_unit(entailment) && in_unit(neutral) && in_unit(contradiction) &&
         std::fabs(entailment + neutral + contradiction - 1.0) <= tol;
}

void CheckerConfig::validate() const {
  auto open_unit = [](double x) { return x > 0.0 && x < 1.0; };
  if (!open_unit(conflict_contradiction_min) || !open_unit(conflict_entailment_max) ||
      !open_unit(nsp_min) || !open_unit(distance_max)) {
    throw Error(Errc::InvalidConfig, "checker thresholds must lie in (0,1)");
  }
}

bool is_conflict(const NliScores& scores, const CheckerConfig& cfg) {
  return scores.contradiction > cfg.conflict_contradiction_min &&
         scores.entailment < cfg.conflict_entailment_max;
}

ConflictCheckResult check_constraint_conflicts(std::span<const std::string> statements,
                                               std::span<const std::string> candidates,
                                               NliScorer& scorer, const CheckerConfig& cfg) {
  if (statements.empty()) {
    throw Error(Errc::InvalidConfig, "conflict check needs at least one statement");
  }
  ConflictCheckResult result;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    for (std::size_t s = 0; s < statements.size(); ++s) {
      NliScores scores;
      try {
        scores = scorer.score(statements[s], candidates[c]);
      } catch (const Error&) {
        throw;
      } catch (const std::exception& e) {
        throw Error(Errc::ScorerFailure, "NLI scorer '" + scorer.name() + "' failed on (" +
                                             statements[s] + ", " + candidates[c] +
                                             "): " + e.what());
      }
      if (!scores.valid()) {
        throw Error(Errc::ScorerFailure, "NLI scorer '" + scorer.name() +
                                             "' returned invalid probabilities on (" +
                                             statements[s] + ", " + candidates[c] + ")");
      }
      result.edges.push_back(
          {s, c, scores.entailment, scores.neutral, scores.contradiction});
      if (is_conflict(scores, cfg)) {
        result.pass = false;
        return result;  // early stop: the verdict cannot change
      }
    }
  }
  result.pass = true;
  return result;
}

double semantic_distance(const std::string& s1, const std::string& s2, EmbeddingScorer& emb) {
  std::vector<double> a;
  std::vector<double> b;
  try {
    a = emb.embed(s1);
    b = emb.embed(s2);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(Errc::ScorerFailure,
                "embedding scorer '" + emb.name() + "' failed: " + e.what());
  }
  if (a.size() != b.size() || a.empty()) {
    throw Error(Errc::ScorerFailure, "embedding dimensions do not match");
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) {
    throw Error(Errc::ZeroVector, "zero-norm embedding in semantic distance");
  }
  return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

bool is_incoherent_edge(double nsp_score, double distance, const CheckerConfig& cfg,
                        CoherenceCriteria criteria) {
  const bool use_nsp = criteria != CoherenceCriteria::CosdistOnly;
  const bool use_dist = criteria != CoherenceCriteria::NspOnly;
  return (use_nsp && nsp_score < cfg.nsp_min) || (use_dist && distance > cfg.distance_max);
}

CoherenceCheckResult check_consecutive_coherence(std::span<const std::string> sentences,
                                                 NspScorer& nsp, EmbeddingScorer& emb,
                                                 const CheckerConfig& cfg,
                                                 CoherenceCriteria criteria) {
  if (sentences.size() < 2) {
    throw Error(Errc::InvalidConfig, "coherence check needs at least two sentences");
  }
  const bool use_nsp = criteria != CoherenceCriteria::CosdistOnly;
  const bool use_dist = criteria != CoherenceCriteria::NspOnly;

  CoherenceCheckResult result;
  for (std::size_t i = 0; i + 1 < sentences.size(); ++i) {
    CoherenceEdge edge;
    edge.position = i;
    edge.nsp_score = 1.0;
    edge.semantic_distance = 0.0;
    if (use_nsp) {
      try {
        edge.nsp_score = nsp.is_next_probability(sentences[i], sentences[i + 1]);
      } catch (const Error&) {
        throw;
      } catch (const std::exception& e) {
        throw Error(Errc::ScorerFailure, "NSP scorer '" + nsp.name() + "' failed on (" +
                                             sentences[i] + ", " + sentences[i + 1] +
                                             "): " + e.what());
      }
      if (edge.nsp_score < 0.0 || edge.nsp_score > 1.0) {
        throw Error(Errc::ScorerFailure,
                    "NSP scorer '" + nsp.name() + "' returned an invalid probability");
      }
    }
    if (use_dist) {
      edge.semantic_distance = semantic_distance(sentences[i], sentences[i + 1], emb);
    }
    result.edges.push_back(edge);
    if (is_incoherent_edge(edge.nsp_score, edge.semantic_distance, cfg, criteria)) {
      result.pass = false;
      return result;
    }
  }
  result.pass = true;
  return result;
}

namespace oracle {

void TableNli::put(const std::string& premise, const std::string& hypothesis, NliScores scores) {
  table_[{premise, hypothesis}] = scores;
}

NliScores TableNli::score(const std::string& premise, const std::string& hypothesis) {
  auto it = table_.find({premise, hypothesis});
  return it == table_.end() ? fallback_ : it->second;
}

NliScores MarkerNli::score(const std::string& /*premise*/, const std::string& hypothesis) {
  return text::icontains(hypothesis, marker_) ? flagged_ : clean_;
}

void TableNsp::put(const std::string& first, const std::string& second, double p) {
  table_[{first, second}] = p;
}

double TableNsp::is_next_probability(const std::string& first, const std::string& second) {
  auto it = table_.find({first, second});
  return it == table_.end() ? fallback_ : it->second;
}

double MarkerNsp::is_next_probability(const std::string& first, const std::string& second) {
  const bool flagged = text::icontains(first, marker_) || text::icontains(second, marker_);
  return flagged ? flagged_ : clean_;
}

void TableEmbedding::put(const std::string& sentence, std::vector<double> v) {
  table_[sentence] = std::move(v);
}

std::vector<double> TableEmbedding::embed(const std::string& sentence) {
  auto it = table_.find(sentence);
  return it == table_.end() ? fallback_ : it->second;
}

}  // namespace oracle

}  // namespace wpgen
