#include "wpgen/solver.hpp"

#include <cmath>

namespace wpgen {

namespace {

double binomial_coefficient(unsigned n, unsigned k) {
  if (k > n - k) k = n - k;
  double c = 1.0;
  for (unsigned i = 0; i < k; ++i) {
    c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
  }
  return c;
}

double resolve_operand(const std::optional<double>& literal, double fallback) {
  return literal.has_value() ? *literal : fallback;
}

unsigned as_count(double x, const char* what) {
  if (x < 0.0 || std::fabs(x - std::round(x)) > 1e-9) {
    throw Error(Errc::UnresolvableKey, std::string(what) + " is not a non-negative integer");
  }
  return static_cast<unsigned>(std::llround(x));
}

}  // namespace

double binomial_pmf(unsigned n, unsigned k, double p) {
  if (k > n) throw Error(Errc::KOutOfRange, "k exceeds n");
  if (p < 0.0 || p > 1.0) throw Error(Errc::ProbabilityOutOfRange, "p outside [0,1]");
  return binomial_coefficient(n, k) * std::pow(p, static_cast<double>(k)) *
         std::pow(1.0 - p, static_cast<double>(n - k));
}

double binomial_at_least(unsigned n, unsigned k, double p) {
  if (k > n) throw Error(Errc::KOutOfRange, "k exceeds n");
  double sum = 0.0;
  for (unsigned j = k; j <= n; ++j) sum += binomial_pmf(n, j, p);
  return sum;
}

double binomial_at_most(unsigned n, unsigned k, double p) {
  if (k > n) throw Error(Errc::KOutOfRange, "k exceeds n");
  double sum = 0.0;
  for (unsigned j = 0; j <= k; ++j) sum += binomial_pmf(n, j, p);
  return sum;
}

double normal_cdf(double x, double mu, double sigma) {
  if (!(sigma > 0.0)) throw Error(Errc::NonPositiveSigma, "sigma must be positive");
  const double z = (x - mu) / sigma;
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

Answer solve(const AnswerKey& key, const DistributionParams& params) {
  switch (key.kind) {
    case AnswerKeyKind::BinomialPmf:
    case AnswerKeyKind::BinomialAtLeast:
    case AnswerKeyKind::BinomialAtMost:
    case AnswerKeyKind::BinomialMean: {
      const auto* b = std::get_if<BinomialParams>(&params);
      if (b == nullptr) {
        throw Error(Errc::UnresolvableKey, "binomial key against non-binomial parameters");
      }
      const unsigned n = as_count(resolve_operand(key.n, b->trial_count_n), "n");
      if (key.kind == AnswerKeyKind::BinomialMean) {
        return {static_cast<double>(n) * b->success_probability, ""};
      }
      const unsigned k = as_count(resolve_operand(key.k, b->target_count_k), "k");
      if (k > n) throw Error(Errc::UnresolvableKey, "k exceeds n");
      switch (key.kind) {
        case AnswerKeyKind::BinomialPmf:
          return {binomial_pmf(n, k, b->success_probability), ""};
        case AnswerKeyKind::BinomialAtLeast:
          return {binomial_at_least(n, k, b->success_probability), ""};
        default:
          return {binomial_at_most(n, k, b->success_probability), ""};
      }
    }
    case AnswerKeyKind::NormalCdfAbove:
    case AnswerKeyKind::NormalCdfBetween:
    case AnswerKeyKind::NormalMean: {
      const auto* g = std::get_if<NormalParams>(&params);
      if (g == nullptr) {
        throw Error(Errc::UnresolvableKey, "normal key against non-normal parameters");
      }
      if (key.kind == AnswerKeyKind::NormalMean) return {g->mean, g->unit};
      if (key.kind == AnswerKeyKind::NormalCdfAbove) {
        if (!key.lower.has_value()) {
          throw Error(Errc::UnresolvableKey, "normal_cdf_above requires a lower bound");
        }
        return {1.0 - normal_cdf(*key.lower, g->mean, g->std_dev), ""};
      }
      if (!key.lower.has_value() || !key.upper.has_value()) {
        throw Error(Errc::UnresolvableKey, "normal_cdf_between requires both bounds");
      }
      if (!std::isfinite(*key.lower) || !std::isfinite(*key.upper)) {
        throw Error(Errc::UnresolvableKey, "bounds must be finite");
      }
      return {normal_cdf(*key.upper, g->mean, g->std_dev) -
                  normal_cdf(*key.lower, g->mean, g->std_dev),
              ""};
    }
  }
  throw Error(Errc::UnresolvableKey, "unknown answer key kind");
}

}  // namespace wpgen
