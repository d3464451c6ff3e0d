#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>

#include "permuton/error.hpp"
#include "permuton/models.hpp"
#include "permuton/tree.hpp"

using namespace permuton;

TEST(Law, Construction) {
  const auto u = PermutationLaw::uniform(3);
  EXPECT_EQ(u.support().size(), 6u);
  const auto p = std::accumulate(u.probabilities().begin(), u.probabilities().end(), 0.0);
  EXPECT_NEAR(p, 1.0, 1e-15);
  EXPECT_THROW(PermutationLaw(2, {{Permutation::parse("12"), 0.5}}), ValidationError);
  EXPECT_THROW(PermutationLaw(2, {{Permutation::parse("123"), 1.0}}), ValidationError);
  const PermutationLaw merged(2, {{Permutation::parse("12"), 0.25}, {Permutation::parse("12"), 0.75}});
  EXPECT_EQ(merged.support().size(), 1u);
  EXPECT_EQ(gap_mode_from_string("uniform"), GapMode::UniformGaps);
  EXPECT_EQ(to_string(GapMode::Equal), "equal");
  EXPECT_THROW(gap_mode_from_string("other"), ValidationError);
}

TEST(Handle, Deterministic) {
  const TreeRealizationHandle a(9, PermutationLaw::uniform(3), GapMode::UniformGaps);
  const TreeRealizationHandle b(9, PermutationLaw::uniform(3), GapMode::UniformGaps);
  const auto ta = realize_truncation(a, 5), tb = realize_truncation(b, 5);
  EXPECT_EQ(ta.pi, tb.pi);
  EXPECT_EQ(ta.cell_lengths, tb.cell_lengths);
  Rng ra(4), rb(4);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sample_pattern_lazy(a, 6, ra), sample_pattern_lazy(b, 6, rb));
  const TreeRealizationHandle c(10, PermutationLaw::uniform(3), GapMode::UniformGaps);
  EXPECT_NE(realize_truncation(c, 5).cell_lengths, ta.cell_lengths);
}

TEST(Handle, TruncationConsistentAcrossDepths) {
  const TreeRealizationHandle h(3, PermutationLaw::uniform(2), GapMode::UniformGaps);
  const auto t4 = realize_truncation(h, 4), t6 = realize_truncation(h, 6);
  EXPECT_NEAR(std::accumulate(t6.cell_lengths.begin(), t6.cell_lengths.end(), 0.0), 1.0, 1e-12);
  // every depth-4 cell is the union of its four depth-6 descendants
  for (int c = 0; c < 16; ++c) {
    double s = 0.0;
    for (int j = 0; j < 4; ++j) s += t6.cell_lengths[c * 4 + j];
    EXPECT_NEAR(s, t4.cell_lengths[c], 1e-15);
    EXPECT_EQ((t6.pi[c * 4] - 1) / 4 + 1, t4.pi[c]);
  }
  EXPECT_THROW(realize_truncation(h, 21), CapExceeded);
}

TEST(Lazy, DiracIdentityAndReverse) {
  const TreeRealizationHandle id(1, PermutationLaw::dirac(Permutation::parse("12")), GapMode::UniformGaps);
  const TreeRealizationHandle rev(1, PermutationLaw::dirac(Permutation::parse("21")), GapMode::Equal);
  Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(sample_pattern_lazy(id, 7, rng), Permutation::identity(7));
    EXPECT_EQ(sample_pattern_lazy(rev, 7, rng), Permutation::identity(7).reversed());
  }
}

TEST(Lazy, AgreesWithDeepTruncation) {
  for (GapMode mode : {GapMode::Equal, GapMode::UniformGaps}) {
    const TreeRealizationHandle h(21, PermutationLaw::uniform(2), mode);
    const PermutonModel trunc = block_from_truncation(realize_truncation(h, 16));
    const PermutonModel lazy = TreePermuton{h};
    const int N = 60000;
    Rng r1(1), r2(2);
    PatternSampler s1(trunc), s2(lazy);
    std::map<std::uint64_t, double> f1, f2;
    for (int i = 0; i < N; ++i) {
      f1[lehmer_rank(s1.draw(4, r1))] += 1.0 / N;
      f2[lehmer_rank(s2.draw(4, r2))] += 1.0 / N;
    }
    double tv = 0.0;
    for (std::uint64_t r = 0; r < 24; ++r) tv += std::abs(f1[r] - f2[r]);
    EXPECT_LT(tv / 2, 5.0 / std::sqrt(static_cast<double>(N))) << to_string(mode);
  }
}

TEST(Allocation, Laws) {
  for (int n : {0, 1, 5, 12}) {
    for (GapMode mode : {GapMode::Equal, GapMode::UniformGaps}) {
      const auto m = allocation_marginal(3, n, mode);
      EXPECT_NEAR(std::accumulate(m.begin(), m.end(), 0.0), 1.0, 1e-12);
    }
    const auto u = allocation_marginal(2, n, GapMode::UniformGaps);
    for (double p : u) EXPECT_NEAR(p, 1.0 / (n + 1), 1e-15);
  }
  double total = 0.0;
  for (int a = 0; a <= 5; ++a)
    for (int b = 0; a + b <= 5; ++b) {
      const std::vector<int> c{a, b, 5 - a - b};
      total += allocation_probability(c, GapMode::Equal);
    }
  EXPECT_NEAR(total, 1.0, 1e-12);
  const std::vector<int> c{2, 0, 3};
  EXPECT_NEAR(allocation_probability(c, GapMode::UniformGaps), 1.0 / 21, 1e-15);
}

TEST(ExpectedDensity, FixedPointValues) {
  const Permutation t21 = Permutation::parse("21");
  for (GapMode mode : {GapMode::Equal, GapMode::UniformGaps}) {
    EXPECT_EQ(expected_pattern_density_exact(PermutationLaw::uniform(2), t21, mode), Rational(1, 2));
    EXPECT_EQ(expected_pattern_density_exact(PermutationLaw::dirac(Permutation::parse("12")), t21, mode), 0);
    EXPECT_EQ(expected_pattern_density_exact(PermutationLaw::dirac(Permutation::parse("21")), t21, mode), 1);
  }
}

TEST(ExpectedDensity, SumsToOneAndSymmetric) {
  for (GapMode mode : {GapMode::Equal, GapMode::UniformGaps}) {
    Rational total = 0;
    const auto law = PermutationLaw::uniform(2);
    for (std::uint64_t r = 0; r < 24; ++r) {
      const Permutation s = Permutation::from_rank(4, r);
      const Rational e = expected_pattern_density_exact(law, s, mode);
      total += e;
      EXPECT_EQ(e, expected_pattern_density_exact(law, s.reversed(), mode));
    }
    EXPECT_EQ(total, 1);
    EXPECT_EQ(expected_pattern_density_exact(law, Permutation::parse("3142"), mode), 0);
  }
  EXPECT_THROW(expected_pattern_density(PermutationLaw::uniform(2), Permutation::identity(7), GapMode::Equal),
               CapExceeded);
}

TEST(ExpectedDensity, DoubleMatchesRational) {
  const auto law = PermutationLaw::uniform(3);
  for (std::uint64_t r = 0; r < 6; ++r) {
    const Permutation s = Permutation::from_rank(3, r);
    EXPECT_NEAR(expected_pattern_density(law, s, GapMode::UniformGaps),
                static_cast<double>(expected_pattern_density_exact(law, s, GapMode::UniformGaps)), 1e-14);
  }
}

TEST(ClassMembership, SeparableCounts) {
  const auto gens = PermutationLaw::uniform(2).support();
  const std::uint64_t schroder[] = {1, 2, 6, 22, 90, 394};
  for (int n = 1; n <= 6; ++n) {
    std::uint64_t c = 0;
    for (std::uint64_t r = 0; r < factorial_u64(n); ++r) c += class_membership(Permutation::from_rank(n, r), gens);
    EXPECT_EQ(c, schroder[n - 1]) << n;
  }
  EXPECT_FALSE(class_membership(Permutation::parse("2413"), gens));
  EXPECT_TRUE(class_membership(Permutation::parse("2143"), gens));
}

TEST(ClassMembership, ForbiddenPattern) {
  EXPECT_EQ(forbidden_pattern(2).to_string(), "3142");
  EXPECT_EQ(forbidden_pattern(3).to_string(), "531642");
  for (int d = 2; d <= 4; ++d) {
    const auto gens = PermutationLaw::uniform(d).support();
    EXPECT_FALSE(class_membership(forbidden_pattern(d), gens)) << d;
    for (const auto& g : gens) EXPECT_TRUE(class_membership(g, gens));
  }
  const std::vector<Permutation> only_id{Permutation::parse("12")};
  EXPECT_TRUE(class_membership(Permutation::identity(6), only_id));
  EXPECT_FALSE(class_membership(Permutation::parse("21"), only_id));
}

TEST(GapStats, MeanSquaredGap) {
  for (int d : {2, 3, 5}) {
    const int sims = 20000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < sims; ++i) {
      const TreeRealizationHandle h(static_cast<std::uint64_t>(i), PermutationLaw::dirac(Permutation::identity(d)),
                                    GapMode::UniformGaps);
      const double l = realization_gap_stats(h, 1).squared_sum;
      s += l;
      s2 += l * l;
    }
    const double mean = s / sims;
    const double se = std::sqrt((s2 / sims - mean * mean) / sims);
    EXPECT_NEAR(mean, 2.0 / (d + 1), 4 * se) << d;
  }
  const TreeRealizationHandle eq(1, PermutationLaw::uniform(2), GapMode::Equal);
  EXPECT_THROW(realization_gap_stats(eq, 2), ValidationError);
}
