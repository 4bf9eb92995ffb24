#pragma once

#include <string>

#include "wpgen/model.hpp"

namespace wpgen {

// C(n,k) * p^k * (1-p)^(n-k). Throws KOutOfRange when k > n and
// ProbabilityOutOfRange when p is outside [0,1].
double binomial_pmf(unsigned n, unsigned k, double p);

// Sum of pmf terms j = k..n (exact summation, no normal approximation).
double binomial_at_least(unsigned n, unsigned k, double p);

// Sum of pmf terms j = 0..k.
double binomial_at_most(unsigned n, unsigned k, double p);

// Phi((x - mu) / sigma) via erfc. Absolute error below 1e-7 (validated
// against a quadrature oracle in the tests). Throws NonPositiveSigma.
double normal_cdf(double x, double mu, double sigma);

struct Answer {
  double value = 0.0;
  std::string unit;  // empty for dimensionless results

  bool operator==(const Answer&) const = default;
};

// Dispatches the key against the distribution parameters. Never consults
// exercise text. Throws UnresolvableKey when the key does not fit the
// parameter variant or required operands are missing.
Answer solve(const AnswerKey& key, const DistributionParams& params);

}  // namespace wpgen
