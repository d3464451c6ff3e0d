#include <gtest/gtest.h>

#include <cmath>

#include "permuton/entropy.hpp"
#include "permuton/entropy_curve.hpp"
#include "permuton/error.hpp"
#include "permuton/estimator.hpp"
#include "permuton/exact.hpp"

using namespace permuton;

TEST(Plugin, Examples) {
  const std::vector<std::uint64_t> even{2, 2}, single{4}, skew{3, 1};
  EXPECT_NEAR(plugin_entropy(even), std::log(2.0), 1e-15);
  EXPECT_EQ(plugin_entropy(single), 0.0);
  EXPECT_NEAR(plugin_entropy(skew), 0.5623351446188083, 1e-15);
  EXPECT_EQ(miller_madow(single), 0.0);
  EXPECT_NEAR(miller_madow(even), std::log(2.0) + 1.0 / 8, 1e-15);
  EXPECT_THROW(plugin_entropy(std::vector<std::uint64_t>{0, 0}), ValidationError);
  EXPECT_EQ(entropy_method_from_string("miller_madow"), EntropyMethod::MillerMadow);
  EXPECT_EQ(to_string(EntropyMethod::Plugin), "plugin");
}

TEST(Plugin, OrderedBelowMillerMadow) {
  Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    std::vector<std::uint64_t> c(1 + rng.below(10));
    for (auto& v : c) v = rng.below(20);
    c[0] += 1;
    EXPECT_LE(plugin_entropy(c), miller_madow(c));
  }
}

TEST(Estimate, LebesgueAndIdentity) {
  Rng rng(1);
  EstimateOptions opt;
  opt.bootstrap_resamples = 50;
  const auto e = estimate_sampling_entropy(LebesguePermuton{}, 3, 600000, rng, EntropyMethod::MillerMadow, opt);
  EXPECT_NEAR(e.value, std::log(6.0), 0.01);
  EXPECT_EQ(e.distinct_patterns, 6u);
  EXPECT_GT(e.stderr_, 0.0);
  const auto z = estimate_sampling_entropy(FunctionPermuton{PiecewiseAffineMap::identity()}, 5, 10000, rng);
  EXPECT_EQ(z.value, 0.0);
  EXPECT_EQ(z.stderr_, 0.0);
  EXPECT_NEAR(z.saturation(), 1e-4, 1e-12);
}

TEST(Estimate, BlockTwentyOne) {
  Rng rng(2);
  const auto e = estimate_sampling_entropy(BlockPermuton(Permutation::parse("21")), 2, 100000, rng);
  EXPECT_NEAR(e.value, 0.5623351446188083, 3 * e.stderr_ + 1e-4);
}

TEST(Estimate, BudgetRefusal) {
  Rng rng(3);
  EXPECT_THROW(estimate_sampling_entropy(LebesguePermuton{}, 8, 100, rng), CapExceeded);
  EstimateOptions opt;
  opt.allow_biased = true;
  opt.bootstrap_resamples = 0;
  EXPECT_NO_THROW(estimate_sampling_entropy(LebesguePermuton{}, 8, 100, rng, EntropyMethod::Plugin, opt));
}

TEST(Estimate, ThreadCountDoesNotChangeCounts) {
  EstimateOptions one, four;
  one.chunk_size = four.chunk_size = 1000;
  four.threads = 4;
  Rng a(12), b(12);
  const PermutonModel mu = FunctionPermuton{PiecewiseAffineMap::tent()};
  const auto ca = sample_pattern_counts(mu, 4, 20500, a, one);
  const auto cb = sample_pattern_counts(mu, 4, 20500, b, four);
  EXPECT_EQ(ca.counts, cb.counts);
  EXPECT_EQ(ca.total, 20500u);
}

TEST(Estimate, ConsistencyOverSeeds) {
  const PermutonModel mu = FunctionPermuton{PiecewiseAffineMap::tent()};
  const double exact = shannon_entropy(exact_distribution(mu, 3));
  EstimateOptions opt;
  opt.bootstrap_resamples = 100;
  int covered = 0;
  for (int s = 0; s < 100; ++s) {
    Rng rng(1000 + s);
    const auto e = estimate_sampling_entropy(mu, 3, 4000, rng, EntropyMethod::MillerMadow, opt);
    covered += std::abs(e.value - exact) < 3 * e.stderr_;
  }
  EXPECT_GE(covered, 95);
}

TEST(MeanEntropy, DiracAndUniform) {
  Rng rng(5);
  const auto dirac = estimate_mean_entropy(PermutationLaw::dirac(Permutation::parse("12")), GapMode::Equal, 4, 5,
                                           2000, rng);
  EXPECT_EQ(dirac.mean, 0.0);
  EXPECT_EQ(dirac.ci_radius, 0.0);
  const auto u = estimate_mean_entropy(PermutationLaw::uniform(2), GapMode::Equal, 2, 30, 5000, rng);
  EXPECT_GT(u.mean - u.ci_radius, 0.0);
  EXPECT_EQ(u.per_realization.size(), 30u);
  EXPECT_THROW(estimate_mean_entropy(PermutationLaw::uniform(2), GapMode::Equal, 2, 1, 10, rng), ValidationError);
}

TEST(MeanEntropy, SpreadZeroOnlyForDeterministicLaw) {
  Rng rng(6);
  const auto a = estimate_mean_entropy(PermutationLaw::dirac(Permutation::parse("21")), GapMode::UniformGaps, 4, 20,
                                       5000, rng);
  EXPECT_EQ(a.spread_per_n, 0.0);
  const auto b = estimate_mean_entropy(PermutationLaw::uniform(2), GapMode::UniformGaps, 4, 20, 5000, rng);
  EXPECT_GT(b.spread_per_n, 0.0);
  EXPECT_TRUE(std::isfinite(b.spread_per_n));
}

TEST(MeanEntropy, ThreadsAgree) {
  EstimateOptions one, three;
  three.threads = 3;
  Rng a(8), b(8);
  const auto x = estimate_mean_entropy(PermutationLaw::uniform(3), GapMode::UniformGaps, 3, 6, 3000, a,
                                       EntropyMethod::Plugin, one);
  const auto y = estimate_mean_entropy(PermutationLaw::uniform(3), GapMode::UniformGaps, 3, 6, 3000, b,
                                       EntropyMethod::Plugin, three);
  EXPECT_EQ(x.per_realization, y.per_realization);
}

TEST(ImpliedRho, ZeroAndRoundTrip) {
  const std::vector<double> zero(8, 0.0);
  for (GapMode mode : {GapMode::Equal, GapMode::UniformGaps}) {
    const auto r0 = implied_rho(zero, {}, 2, mode);
    for (int n = 2; n < 8; ++n) EXPECT_EQ(r0.value(n), 0.0);
    std::vector<double> y(9, 0.0);
    for (int n = 2; n <= 8; ++n) y[n] = std::lgamma(n + 1.0);
    const auto rho = implied_rho(y, {}, 3, mode);
    for (int n = 2; n <= 8; ++n) {
      const auto w = rho_recurrence_weights(3, mode, n);
      double fwd = rho.value(n);
      for (int k = 0; k < n; ++k) fwd += w[k] * y[k];
      EXPECT_NEAR(fwd, y[n], 1e-12);
    }
  }
}

TEST(ImpliedRho, WeightsMatchAllocationLaw) {
  // rearranging y_n = rho_n + d sum_k P(child gets k) y_k isolates y_n
  for (GapMode mode : {GapMode::Equal, GapMode::UniformGaps}) {
    for (int n = 2; n <= 9; ++n) {
      const auto p = allocation_marginal(3, n, mode);
      const auto w = rho_recurrence_weights(3, mode, n);
      const double stay = 1.0 - 3 * p[n];
      for (int k = 0; k < n; ++k) EXPECT_NEAR(w[k], 3 * p[k] / stay, 1e-12);
    }
  }
  EXPECT_NEAR(rho_upper_bound(2, 3), 8 * std::log(3.0), 1e-15);
}

TEST(Curve, EstimatedMatchesExactShape) {
  Rng rng(9);
  EstimateOptions opt;
  opt.bootstrap_resamples = 20;
  const auto c = estimated_entropy_curve(LebesguePermuton{}, 4, 200000, rng, EntropyMethod::MillerMadow, opt);
  ASSERT_EQ(c.rows.size(), 4u);
  EXPECT_TRUE(c.estimated);
  EXPECT_NEAR(c.rows[3].H, std::log(24.0), 0.02);
  EXPECT_NE(c.to_csv().find("stderr,distinct_patterns"), std::string::npos);
}
