#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wpgen/model.hpp"

namespace wpgen {

struct NliScores {
  double entailment = 0.0;
  double neutral = 0.0;
  double contradiction = 0.0;

  bool valid(double tol = 1e-6) const;
};

struct CheckerConfig {
  double conflict_contradiction_min = 0.5;
  double conflict_entailment_max = 0.2;
  double nsp_min = 0.99;
  double distance_max = 0.3;

  void validate() const;  // throws InvalidConfig unless all lie in (0,1)
};

class NliScorer {
 public:
  virtual ~NliScorer() = default;
  virtual NliScores score(const std::string& premise, const std::string& hypothesis) = 0;
  virtual std::string name() const = 0;
};

class NspScorer {
 public:
  virtual ~NspScorer() = default;
  // Probability that `second` follows `first`.
  virtual double is_next_probability(const std::string& first, const std::string& second) = 0;
  virtual std::string name() const = 0;
};

class EmbeddingScorer {
 public:
  virtual ~EmbeddingScorer() = default;
  virtual std::vector<double> embed(const std::string& sentence) = 0;
  virtual std::string name() const = 0;
};

// Pure conflict predicate: contradiction above the minimum AND entailment
// below the maximum.
bool is_conflict(const NliScores& scores, const CheckerConfig& cfg);

struct ConflictCheckResult {
  bool pass = true;
  std::vector<ConflictEdge> edges;  // scored edges, in evaluation order
};

// Scores statement x candidate pairs with premise = statement. Stops at the
// first conflicting edge (the verdict is already decided then); a passing
// result carries every edge. Statements are the ground truth and must be
// non-empty. Scorer exceptions surface as ScorerFailure naming the pair.
ConflictCheckResult check_constraint_conflicts(std::span<const std::string> statements,
                                               std::span<const std::string> candidates,
                                               NliScorer& scorer, const CheckerConfig& cfg);

// 1 - cosine similarity, in [0, 2]. Throws ZeroVector on a zero-norm
// embedding.
double semantic_distance(const std::string& s1, const std::string& s2, EmbeddingScorer& emb);

enum class CoherenceCriteria { NspOnly, CosdistOnly, Both };

// Pure edge predicate: incoherent when the NSP score falls below nsp_min or
// the distance exceeds distance_max, restricted by the active criteria.
bool is_incoherent_edge(double nsp_score, double distance, const CheckerConfig& cfg,
                        CoherenceCriteria criteria = CoherenceCriteria::Both);

struct CoherenceCheckResult {
  bool pass = true;
  std::vector<CoherenceEdge> edges;
};

// Single forward pass over adjacent pairs. An edge is incoherent when the
// NSP score falls below nsp_min or the embedding distance exceeds
// distance_max (restricted by `criteria`); evaluation stops at the first
// incoherent edge. Needs at least two sentences.
CoherenceCheckResult check_consecutive_coherence(std::span<const std::string> sentences,
                                                 NspScorer& nsp, EmbeddingScorer& emb,
                                                 const CheckerConfig& cfg,
                                                 CoherenceCriteria criteria = CoherenceCriteria::Both);

namespace oracle {

// Lookup-table NLI scorer with a configurable default. Pairs are keyed as
// (premise, hypothesis).
class TableNli : public NliScorer {
 public:
  explicit TableNli(NliScores fallback = {0.30, 0.60, 0.10}) : fallback_(fallback) {}
  void put(const std::string& premise, const std::string& hypothesis, NliScores scores);
  NliScores score(const std::string& premise, const std::string& hypothesis) override;
  std::string name() const override { return "oracle-nli-table"; }

 private:
  std::map<std::pair<std::string, std::string>, NliScores> table_;
  NliScores fallback_;
};

// Flags any hypothesis containing the marker substring (case-insensitive).
class MarkerNli : public NliScorer {
 public:
  explicit MarkerNli(std::string marker, NliScores flagged = {0.05, 0.25, 0.70},
                     NliScores clean = {0.30, 0.60, 0.10})
      : marker_(std::move(marker)), flagged_(flagged), clean_(clean) {}
  NliScores score(const std::string& premise, const std::string& hypothesis) override;
  std::string name() const override { return "oracle-nli-marker"; }

 private:
  std::string marker_;
  NliScores flagged_;
  NliScores clean_;
};

class TableNsp : public NspScorer {
 public:
  explicit TableNsp(double fallback = 0.995) : fallback_(fallback) {}
  void put(const std::string& first, const std::string& second, double p);
  double is_next_probability(const std::string& first, const std::string& second) override;
  std::string name() const override { return "oracle-nsp-table"; }

 private:
  std::map<std::pair<std::string, std::string>, double> table_;
  double fallback_;
};

// Low NSP score whenever either sentence contains the marker.
class MarkerNsp : public NspScorer {
 public:
  explicit MarkerNsp(std::string marker, double flagged = 0.5, double clean = 0.999)
      : marker_(std::move(marker)), flagged_(flagged), clean_(clean) {}
  double is_next_probability(const std::string& first, const std::string& second) override;
  std::string name() const override { return "oracle-nsp-marker"; }

 private:
  std::string marker_;
  double flagged_;
  double clean_;
};

// Fixed-vector embeddings; unknown sentences share one default vector, so
// their pairwise distance is zero.
class TableEmbedding : public EmbeddingScorer {
 public:
  explicit TableEmbedding(std::vector<double> fallback = {1.0, 0.0})
      : fallback_(std::move(fallback)) {}
  void put(const std::string& sentence, std::vector<double> v);
  std::vector<double> embed(const std::string& sentence) override;
  std::string name() const override { return "oracle-embedding-table"; }

 private:
  std::map<std::string, std::vector<double>> table_;
  std::vector<double> fallback_;
};

}  // namespace oracle

}  // namespace wpgen
