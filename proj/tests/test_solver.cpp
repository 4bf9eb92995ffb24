#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdint>

#include "doctest.h"
#include "wpgen/solver.hpp"

using namespace wpgen;

namespace {

// Brute-force oracle: walk all 2^n outcome strings and add up the weight of
// those with exactly k successes.
double pmf_by_enumeration(unsigned n, unsigned k, double p) {
  double sum = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    unsigned ones = 0;
    double weight = 1.0;
    for (unsigned bit = 0; bit < n; ++bit) {
      if (mask & (1u << bit)) {
        ++ones;
        weight *= p;
      } else {
        weight *= 1.0 - p;
      }
    }
    if (ones == k) sum += weight;
  }
  return sum;
}

// Composite Simpson quadrature of the standard normal density over [a, b].
double standard_normal_mass(double a, double b, int steps) {
  auto density = [](double t) {
    return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::acos(-1.0));
  };
  const double h = (b - a) / steps;
  double sum = density(a) + density(b);
  for (int i = 1; i < steps; ++i) {
    sum += density(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return sum * h / 3.0;
}

double cdf_by_quadrature(double z) { return standard_normal_mass(-12.0, z, 40000); }

}  // namespace

TEST_CASE("binomial pmf matches brute-force enumeration on the 8-trial case") {
  const double expected = pmf_by_enumeration(8, 5, 0.55);
  CHECK(std::fabs(binomial_pmf(8, 5, 0.55) - expected) < 1e-12);
  // frozen value from the oracle above
  CHECK(std::fabs(expected - 0.2568260165625) < 1e-12);
}

TEST_CASE("binomial pmf boundary and symmetry cases") {
  CHECK(binomial_pmf(2, 1, 0.5) == doctest::Approx(0.5));
  for (unsigned n : {1u, 4u, 9u}) {
    for (double p : {0.2, 0.55, 0.9}) {
      CHECK(std::fabs(binomial_pmf(n, 0, p) - std::pow(1.0 - p, n)) < 1e-15);
      CHECK(std::fabs(binomial_pmf(n, n, p) - std::pow(p, n)) < 1e-15);
    }
  }
}

TEST_CASE("binomial pmf sums to one") {
  for (unsigned n = 1; n <= 20; ++n) {
    for (double p = 0.1; p < 0.95; p += 0.1) {
      double sum = 0.0;
      for (unsigned k = 0; k <= n; ++k) sum += binomial_pmf(n, k, p);
      CHECK(std::fabs(sum - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("binomial pmf rejects bad arguments") {
  CHECK_THROWS_AS((void)binomial_pmf(3, 4, 0.5), Error);
  CHECK_THROWS_AS((void)binomial_pmf(3, 1, 1.5), Error);
}

TEST_CASE("binomial tails are exact sums of pmf terms") {
  double tail = 0.0;
  for (unsigned j = 7; j <= 8; ++j) tail += binomial_pmf(8, j, 0.55);
  CHECK(std::fabs(binomial_at_least(8, 7, 0.55) - tail) < 1e-12);

  double head = 0.0;
  for (unsigned j = 0; j <= 5; ++j) head += binomial_pmf(8, j, 0.55);
  CHECK(std::fabs(binomial_at_most(8, 5, 0.55) - head) < 1e-12);

  CHECK(std::fabs(binomial_at_least(8, 0, 0.55) - 1.0) < 1e-12);
}

TEST_CASE("normal cdf hits the quadrature oracle") {
  CHECK(normal_cdf(428.0, 428.0, 24.0) == doctest::Approx(0.5).epsilon(1e-12));
  const double oracle = cdf_by_quadrature(1.0);
  CHECK(std::fabs(normal_cdf(452.0, 428.0, 24.0) - oracle) < 1e-6);
  CHECK(std::fabs(oracle - 0.8413447) < 1e-6);
  // a couple more z points
  CHECK(std::fabs(normal_cdf(1.96, 0.0, 1.0) - cdf_by_quadrature(1.96)) < 1e-6);
  CHECK(std::fabs(normal_cdf(-2.5, 0.0, 1.0) - cdf_by_quadrature(-2.5)) < 1e-6);
}

TEST_CASE("normal cdf reflection symmetry and monotonicity") {
  for (double x = 380.0; x <= 480.0; x += 7.0) {
    CHECK(std::fabs(normal_cdf(x, 428.0, 24.0) + normal_cdf(2 * 428.0 - x, 428.0, 24.0) - 1.0) <
          1e-6);
  }
  double prev = 0.0;
  for (double x = 350.0; x <= 500.0; x += 2.5) {
    const double v = normal_cdf(x, 428.0, 24.0);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("normal cdf rejects non-positive sigma") {
  CHECK_THROWS_AS((void)normal_cdf(1.0, 0.0, 0.0), Error);
  CHECK_THROWS_AS((void)normal_cdf(1.0, 0.0, -2.0), Error);
}

TEST_CASE("solve dispatches binomial keys") {
  const DistributionParams params = BinomialParams{0.55, "traffic light", {"red", "green"}, 8, 5};

  AnswerKey mean{AnswerKeyKind::BinomialMean, {}, {}, {}, {}};
  CHECK(solve(mean, params).value == doctest::Approx(4.4));
  CHECK(solve(mean, params).unit.empty());

  AnswerKey tail{AnswerKeyKind::BinomialAtLeast, 7.0, {}, {}, {}};
  CHECK(std::fabs(solve(tail, params).value -
                  (binomial_pmf(8, 7, 0.55) + binomial_pmf(8, 8, 0.55))) < 1e-12);

  AnswerKey pmf{AnswerKeyKind::BinomialPmf, {}, {}, {}, {}};  // k, n from the parameters
  CHECK(std::fabs(solve(pmf, params).value - binomial_pmf(8, 5, 0.55)) < 1e-15);

  AnswerKey single{AnswerKeyKind::BinomialPmf, 1.0, 1.0, {}, {}};
  CHECK(solve(single, params).value == doctest::Approx(0.55));
}

TEST_CASE("solve dispatches normal keys") {
  const DistributionParams params = NormalParams{428.0, 24.0, "water consumption", "ml"};

  AnswerKey mean{AnswerKeyKind::NormalMean, {}, {}, {}, {}};
  const Answer a = solve(mean, params);
  CHECK(a.value == 428.0);
  CHECK(a.unit == "ml");

  AnswerKey above{AnswerKeyKind::NormalCdfAbove, {}, {}, 452.0, {}};
  CHECK(std::fabs(solve(above, params).value - (1.0 - normal_cdf(452.0, 428.0, 24.0))) < 1e-12);

  AnswerKey between{AnswerKeyKind::NormalCdfBetween, {}, {}, 404.0, 452.0};
  CHECK(std::fabs(solve(between, params).value -
                  (normal_cdf(452.0, 428.0, 24.0) - normal_cdf(404.0, 428.0, 24.0))) < 1e-12);
}

TEST_CASE("solve rejects unresolvable keys") {
  const DistributionParams binomial = BinomialParams{0.5, "coin", {"heads", "tails"}, 4, 2};
  const DistributionParams normal = NormalParams{1.0, 0.5, "height", "m"};

  CHECK_THROWS_AS((void)solve({AnswerKeyKind::NormalMean, {}, {}, {}, {}}, binomial), Error);
  CHECK_THROWS_AS((void)solve({AnswerKeyKind::BinomialMean, {}, {}, {}, {}}, normal), Error);
  CHECK_THROWS_AS((void)solve({AnswerKeyKind::NormalCdfAbove, {}, {}, {}, {}}, normal), Error);
  CHECK_THROWS_AS((void)solve({AnswerKeyKind::NormalCdfBetween, {}, {}, 1.0, {}}, normal), Error);
  CHECK_THROWS_AS((void)solve({AnswerKeyKind::BinomialPmf, 9.0, {}, {}, {}}, binomial), Error);
}
