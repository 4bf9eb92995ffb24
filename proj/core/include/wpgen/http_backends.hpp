#pragma once

#include <memory>
#include <string>

#include "wpgen/checkers.hpp"
#include "wpgen/infill.hpp"

namespace wpgen {

// Adapters that consume pretrained/fine-tuned checkpoints through a small
// HTTP model server (scripts/serve_models.py speaks this protocol):
//
//   POST /infill {left, right, nucleus, max_new_tokens, seed} -> {text}
//   POST /nli    {premise, hypothesis} -> {entailment, neutral, contradiction}
//   POST /nsp    {first, second}       -> {is_next}   (accept-class probability)
//   POST /embed  {sentence}            -> {vector: [..]}
//
// Endpoints come from flags or the environment (WPGEN_INFILL_ENDPOINT,
// WPGEN_NLI_ENDPOINT, WPGEN_NSP_ENDPOINT, WPGEN_EMBED_ENDPOINT). Connection
// failures surface as BackendUnavailable, bad payloads as ScorerFailure.

class HttpInfillBackend : public InfillBackend {
 public:
  explicit HttpInfillBackend(std::string endpoint);
  ~HttpInfillBackend() override;
  std::string raw_generate(const InfillQuery& query) override;
  std::string name() const override { return "neural"; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

class HttpNliScorer : public NliScorer {
 public:
  explicit HttpNliScorer(std::string endpoint);
  ~HttpNliScorer() override;
  NliScores score(const std::string& premise, const std::string& hypothesis) override;
  std::string name() const override { return "neural-nli"; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

class HttpNspScorer : public NspScorer {
 public:
  explicit HttpNspScorer(std::string endpoint);
  ~HttpNspScorer() override;
  double is_next_probability(const std::string& first, const std::string& second) override;
  std::string name() const override { return "neural-nsp"; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

class HttpEmbeddingScorer : public EmbeddingScorer {
 public:
  explicit HttpEmbeddingScorer(std::string endpoint);
  ~HttpEmbeddingScorer() override;
  std::vector<double> embed(const std::string& sentence) override;
  std::string name() const override { return "neural-embedding"; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace wpgen
