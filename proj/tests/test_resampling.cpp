#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "smc/error.hpp"
#include "smc/resampling.hpp"

namespace {

using namespace smc;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> random_probs(std::mt19937_64& gen, std::size_t K) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(K);
  for (auto& x : p) x = e(gen);
  // Some exact zeros to exercise skipping.
  if (K > 3 && gen() % 4 == 0) p[gen() % K] = 0.0;
  const double s = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& x : p) x /= s;
  return p;
}

std::vector<std::size_t> counts_of(const std::vector<std::size_t>& ids, std::size_t K) {
  std::vector<std::size_t> c(K, 0);
  for (auto i : ids) ++c[i];
  return c;
}

// Systematic counts for a given offset u, computed directly from the
// cumulative sums: particle k receives every point (i + u) / K that falls in
// its interval.
std::vector<std::size_t> systematic_reference(const std::vector<double>& p, double u) {
  const std::size_t K = p.size();
  std::vector<std::size_t> c(K, 0);
  double lo = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const double hi = lo + p[k];
    for (std::size_t i = 0; i < K; ++i) {
      const double point = (static_cast<double>(i) + u) / static_cast<double>(K);
      if (point >= lo && point < hi) ++c[k];
    }
    lo = hi;
  }
  return c;
}

TEST(Normalize, LogSumExpIsStable) {
  const std::vector<double> lw = {1000.0, 1000.0, -kInf};
  const auto n = normalize(lw);
  EXPECT_NEAR(n.probs[0], 0.5, 1e-15);
  EXPECT_EQ(n.probs[2], 0.0);
  EXPECT_NEAR(n.log_sum, 1000.0 + std::log(2.0), 1e-12);
  EXPECT_NEAR(n.log_mean, 1000.0 + std::log(2.0 / 3.0), 1e-12);
}

TEST(Normalize, DegenerateWeightsThrow) {
  EXPECT_THROW(normalize(std::vector<double>{-kInf, -kInf}), DegenerateWeightsError);
  EXPECT_THROW(normalize(std::vector<double>{0.0, std::nan("")}), DegenerateWeightsError);
  EXPECT_THROW(normalize(std::vector<double>{0.0, kInf}), DegenerateWeightsError);
}

TEST(Ess, ExactForEqualWeightsAndBounded) {
  for (std::size_t K : {1u, 3u, 7u, 1000u}) {
    const std::vector<double> p(K, 1.0 / static_cast<double>(K));
    EXPECT_EQ(ess(p), static_cast<double>(K));
  }
  EXPECT_EQ(ess(std::vector<double>{1.0, 0.0, 0.0}), 1.0);
  EXPECT_NEAR(ess(std::vector<double>{0.5, 0.5, 0.0, 0.0}), 2.0, 1e-12);
}

TEST(ShouldResample, StrictThresholdSemantics) {
  const std::vector<double> equal(4, 0.25);
  const std::vector<double> skewed = {0.4, 0.2, 0.2, 0.2};
  EXPECT_FALSE(should_resample(equal, 1.0));
  EXPECT_TRUE(should_resample(skewed, 1.0));
  EXPECT_FALSE(should_resample(skewed, 0.0));
  EXPECT_FALSE(should_resample(std::vector<double>{1.0, 0.0}, 0.0));
  // ESS/K = 0.5 exactly: not below 0.5.
  EXPECT_FALSE(should_resample(std::vector<double>{0.5, 0.5, 0.0, 0.0}, 0.5));
  EXPECT_THROW(should_resample(equal, 1.5), ConfigError);
  EXPECT_THROW(should_resample(equal, -0.1), ConfigError);
}

TEST(Resample, SortedValidAndSkipsZeros) {
  const std::vector<double> p = {0.0, 0.3, 0.0, 0.7, 0.0};
  for (auto method : {ResampleMethod::multinomial, ResampleMethod::systematic, ResampleMethod::residual}) {
    Rng rng(4);
    for (int rep = 0; rep < 100; ++rep) {
      const auto ids = resample(p, 5, method, rng);
      ASSERT_EQ(ids.size(), 5u);
      ASSERT_TRUE(std::is_sorted(ids.begin(), ids.end()));
      for (auto i : ids) ASSERT_TRUE(i == 1 || i == 3) << method_name(method);
    }
  }
}

TEST(Resample, ParseMethodNames) {
  EXPECT_EQ(parse_resample_method("systematic"), ResampleMethod::systematic);
  EXPECT_EQ(parse_resample_method("multinomial"), ResampleMethod::multinomial);
  EXPECT_EQ(parse_resample_method("residual"), ResampleMethod::residual);
  EXPECT_THROW(parse_resample_method("stratified"), ConfigError);
}

TEST(Systematic, BracketPropertyOnRandomWeights) {
  std::mt19937_64 gen(2024);
  Rng rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t K = 2 + gen() % 63;
    const auto p = random_probs(gen, K);
    const auto c = counts_of(resample(p, K, ResampleMethod::systematic, rng), K);
    for (std::size_t k = 0; k < K; ++k) {
      const double target = static_cast<double>(K) * p[k];
      ASSERT_GE(static_cast<double>(c[k]), std::floor(target) - 1e-9) << "K=" << K;
      ASSERT_LE(static_cast<double>(c[k]), std::ceil(target) + 1e-9) << "K=" << K;
    }
  }
}

TEST(Systematic, OutcomesMatchEnumeratedOffsets) {
  // Every offset u in [0, 1) gives one of finitely many count vectors; the
  // breakpoints are the fractional parts of K * cumsum. The resampler output
  // must be one of them, and each must satisfy the bracket property.
  std::mt19937_64 gen(99);
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t K = 2 + gen() % 20;
    const auto p = random_probs(gen, K);
    std::vector<double> breaks = {0.0, 1.0};
    double acc = 0.0;
    for (double x : p) {
      acc += x;
      const double s = acc * static_cast<double>(K);
      breaks.push_back(s - std::floor(s));
    }
    std::sort(breaks.begin(), breaks.end());
    std::set<std::vector<std::size_t>> outcomes;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
      if (breaks[i + 1] - breaks[i] < 1e-9) continue;
      const auto c = systematic_reference(p, 0.5 * (breaks[i] + breaks[i + 1]));
      for (std::size_t k = 0; k < K; ++k) {
        const double target = static_cast<double>(K) * p[k];
        ASSERT_TRUE(c[k] == std::floor(target) || c[k] == std::ceil(target));
      }
      outcomes.insert(c);
    }
    const auto got = counts_of(resample(p, K, ResampleMethod::systematic, rng), K);
    EXPECT_TRUE(outcomes.count(got)) << "K=" << K;
  }
}

// Total draws of each index over many repetitions against the binomial CLT.
void check_count_fractions(ResampleMethod method, bool exact_mean_only) {
  const std::vector<double> p = {0.05, 0.15, 0.3, 0.02, 0.48};
  const std::size_t K = p.size() * 20;
  std::vector<double> probs;
  for (std::size_t r = 0; r < 20; ++r)
    for (double x : p) probs.push_back(x / 20.0);
  const int reps = 4000;
  Rng rng(31);
  std::vector<double> sum(K, 0.0), sq(K, 0.0);
  for (int r = 0; r < reps; ++r) {
    const auto c = counts_of(resample(probs, K, method, rng), K);
    for (std::size_t k = 0; k < K; ++k) {
      sum[k] += static_cast<double>(c[k]);
      sq[k] += static_cast<double>(c[k] * c[k]);
    }
  }
  const double z_crit = 3.290527;  // two-sided alpha = 0.001
  int failures = 0;
  for (std::size_t k = 0; k < K; ++k) {
    const double expect = static_cast<double>(K) * probs[k];
    const double mean = sum[k] / reps;
    double var;
    if (exact_mean_only) {
      var = sq[k] / reps - mean * mean;  // residual: empirical variance
    } else {
      var = expect * (1.0 - probs[k]);  // multinomial marginal: binomial(K, p)
    }
    const double se = std::sqrt(std::max(var, 1e-12) / reps);
    if (std::abs(mean - expect) / se > z_crit) ++failures;
  }
  // 100 comparisons at alpha = 0.001: more than 2 rejections is very unlikely.
  EXPECT_LE(failures, 2);
}

TEST(Multinomial, CountFractionsFollowClt) { check_count_fractions(ResampleMethod::multinomial, false); }

TEST(Residual, CountFractionsFollowClt) { check_count_fractions(ResampleMethod::residual, true); }

TEST(Residual, FloorCopiesAreGuaranteed) {
  const std::vector<double> p = {0.52, 0.28, 0.2};
  Rng rng(6);
  for (int r = 0; r < 200; ++r) {
    const auto c = counts_of(resample(p, 10, ResampleMethod::residual, rng), 3);
    EXPECT_GE(c[0], 5u);
    EXPECT_GE(c[1], 2u);
    EXPECT_GE(c[2], 2u);
  }
}

}  // namespace
