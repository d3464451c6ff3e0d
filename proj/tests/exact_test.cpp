#include <gtest/gtest.h>

#include <cmath>

#include "permuton/entropy.hpp"
#include "permuton/entropy_curve.hpp"
#include "permuton/error.hpp"
#include "permuton/exact.hpp"

using namespace permuton;
using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

namespace {

// Number of split points m1 with sigma increasing on [1, m1] and on (m1, n].
int doubling_splits(const Permutation& s) {
  int c = 0;
  for (int m1 = 0; m1 <= s.size(); ++m1) {
    bool ok = true;
    for (int i = 1; i < s.size() && ok; ++i) {
      if (i != m1) ok = s[i - 1] < s[i];
    }
    c += ok;
  }
  return c;
}

}  // namespace

TEST(ExactBlock, TwoByTwo) {
  const auto d = exact_block_distribution(BlockPermuton(Permutation::parse("21")), 2);
  EXPECT_NEAR(d.probability(Permutation::parse("21")), 0.75, 1e-15);
  EXPECT_NEAR(d.probability(Permutation::parse("12")), 0.25, 1e-15);
  const auto e = exact_block_distribution(BlockPermuton(Permutation::parse("12")), 2);
  EXPECT_NEAR(e.probability(Permutation::parse("12")), 0.75, 1e-15);
}

TEST(ExactBlock, SingleBlockIsLebesgue) {
  for (int n = 1; n <= 6; ++n) {
    const auto d = exact_block_distribution(BlockPermuton(Permutation::parse("1")), n);
    EXPECT_EQ(d.support_size(), factorial_u64(n));
    EXPECT_NEAR(shannon_entropy(d), std::lgamma(n + 1.0), 1e-12);
  }
}

TEST(ExactBlock, Caps) {
  EXPECT_THROW(exact_block_distribution(BlockPermuton(Permutation::parse("21")), 10), CapExceeded);
  EXPECT_THROW(exact_block_distribution(BlockPermuton(Permutation::parse("213456789")), 3), CapExceeded);
}

TEST(ExactFunction, DoublingSmallCases) {
  const auto f = PiecewiseAffineMap::doubling();
  const auto d = exact_function_distribution(f, 2);
  EXPECT_NEAR(d.probability(Permutation::parse("12")), 0.75, 1e-15);
  EXPECT_NEAR(d.probability(Permutation::parse("21")), 0.25, 1e-15);
}

TEST(ExactFunction, DoublingClosedFormExactly) {
  const auto f = PiecewiseAffineMap::doubling();
  for (int n = 1; n <= 7; ++n) {
    const auto d = exact_function_distribution(f, n);
    for (std::uint64_t r = 0; r < factorial_u64(n); ++r) {
      const Permutation s = Permutation::from_rank(n, r);
      const cpp_rational expected(cpp_int(doubling_splits(s)), cpp_int(1) << n);
      EXPECT_EQ(cpp_rational(d.probability_of_rank(r)), expected) << s.to_string();
    }
  }
}

TEST(ExactFunction, IdentityIsPointMass) {
  for (int n = 1; n <= 6; ++n) {
    const auto d = exact_function_distribution(PiecewiseAffineMap::identity(), n);
    EXPECT_EQ(d.support_size(), 1u);
    EXPECT_DOUBLE_EQ(d.probability(Permutation::identity(n)), 1.0);
  }
}

TEST(ExactFunction, RejectsNonMeasurePreserving) {
  const PiecewiseAffineMap half({{0.0, 1.0, 0.5, 0.0}});
  EXPECT_THROW(exact_function_distribution(half, 3), ValidationError);
}

TEST(ExactFunction, HalfSwap) {
  // x + 1/2 on the left half, x - 1/2 on the right: k left points give the
  // rotation (n-k+1 .. n, 1 .. n-k)
  const PiecewiseAffineMap swap({{0.0, 0.5, 1.0, 0.5}, {0.5, 1.0, 1.0, -0.5}});
  const auto d = exact_function_distribution(swap, 4);
  EXPECT_EQ(d.support_size(), 4u);
  EXPECT_NEAR(d.probability(Permutation::parse("1234")), 2.0 / 16, 1e-15);
  EXPECT_NEAR(d.probability(Permutation::parse("4123")), 4.0 / 16, 1e-15);
  EXPECT_NEAR(d.probability(Permutation::parse("3412")), 6.0 / 16, 1e-15);
  EXPECT_NEAR(d.probability(Permutation::parse("2341")), 4.0 / 16, 1e-15);
}

TEST(Sandwich, DoublingBoundsHold) {
  const auto f = PiecewiseAffineMap::doubling();
  for (int n = 1; n <= 9; ++n) {
    const auto s = function_entropy_sandwich(f, n);
    EXPECT_LE(s.lower, s.exact + 1e-12) << n;
    EXPECT_LE(s.exact, s.upper + 1e-12) << n;
  }
  const auto t = function_entropy_sandwich(PiecewiseAffineMap::tent(), 6);
  EXPECT_LE(t.lower, t.exact + 1e-12);
  EXPECT_LE(t.exact, t.upper + 1e-12);
}

TEST(Interleaving, Counts) {
  EXPECT_EQ(interleaving_count(std::vector<int>{2, 1}), 3);
  EXPECT_EQ(interleaving_count(std::vector<int>{5}), 1);
  EXPECT_EQ(interleaving_count(std::vector<int>{1, 1, 1}), 6);
  EXPECT_EQ(interleaving_count(std::vector<int>{}), 1);
  // 40! / (20! 20!) fits; 70 ones overflow 64 bits
  EXPECT_EQ(interleaving_count(std::vector<int>{20, 20}), cpp_int("137846528820"));
  cpp_int f70 = 1;
  for (int i = 2; i <= 70; ++i) f70 *= i;
  EXPECT_EQ(interleaving_count(std::vector<int>(70, 1)), f70);
  EXPECT_THROW(interleaving_count(std::vector<int>{-1}), ValidationError);
}

TEST(GeomSep, DegenerateCases) {
  const std::vector<double> one{1.0};
  std::vector<std::vector<double>> h{{0, 0, std::log(2.0), std::log(6.0)}};
  const auto g = geom_sep_entropy(one, h, 3);
  EXPECT_NEAR(g.value, std::log(6.0), 1e-15);
  EXPECT_NEAR(g.omega_upper, std::log(4.0), 1e-15);
  const std::vector<double> two{0.3, 0.7};
  std::vector<std::vector<double>> zero(2, std::vector<double>(5, 0.0));
  EXPECT_EQ(geom_sep_entropy(two, zero, 4).value, 0.0);
  EXPECT_THROW(geom_sep_entropy(two, zero, 5), ValidationError);
}

TEST(GeomSep, BracketsBlockEntropy) {
  const std::vector<double> w{0.5, 0.5};
  std::vector<std::vector<double>> h(2);
  for (int k = 0; k <= 2; ++k) {
    h[0].push_back(std::lgamma(k + 1.0));
    h[1].push_back(std::lgamma(k + 1.0));
  }
  const auto g = geom_sep_entropy(w, h, 2);
  const double H2 = shannon_entropy(exact_block_distribution(BlockPermuton(Permutation::parse("21")), 2));
  EXPECT_NEAR(H2, 0.5623351446188083, 1e-12);
  EXPECT_LE(g.value, H2);
  EXPECT_LE(H2, g.value + g.omega_upper);
}

TEST(Integral, ClosedFormAndQuadrature) {
  EXPECT_NEAR(integral_log_abs_derivative(PiecewiseAffineMap::doubling()), std::log(2.0), 1e-15);
  EXPECT_EQ(integral_log_abs_derivative(PiecewiseAffineMap::identity()), 0.0);
  const PiecewiseAffineMap mixed({{0.0, 0.5, 2.0, 0.0}, {0.5, 0.75, 4.0, -2.0}, {0.75, 1.0, 4.0, -3.0}});
  EXPECT_NEAR(integral_log_abs_derivative(mixed), 1.5 * std::log(2.0), 1e-12);
  // logistic map f(x) = 4x(1-x): int log|4 - 8x| dx = 2 log 2 - 1
  const std::vector<double> br{0.0, 0.5, 1.0};
  EXPECT_NEAR(integral_log_abs_derivative([](double x) { return 4.0 - 8.0 * x; }, br), 2 * std::log(2.0) - 1, 1e-7);
  EXPECT_THROW(integral_log_abs_derivative([](double) { return 0.0; }, br), ValidationError);
}

TEST(Curve, LebesgueAndIdentity) {
  const auto c = exact_entropy_curve(LebesguePermuton{}, 8);
  for (const auto& r : c.rows) EXPECT_NEAR(r.H, std::lgamma(r.n + 1.0), 1e-12);
  EXPECT_TRUE(std::isnan(c.rows[0].H_per_nlogn));
  const auto z = exact_entropy_curve(FunctionPermuton{PiecewiseAffineMap::identity()}, 6);
  for (const auto& r : z.rows) EXPECT_EQ(r.H, 0.0);
}

TEST(Curve, DoublingGolden) {
  const auto c = exact_entropy_curve(FunctionPermuton{PiecewiseAffineMap::doubling()}, 9);
  const double golden[] = {0.0, 0.5623351446188083, 1.3862943611198906, 2.269639374604125, 3.129781002319466,
                           3.946049160806747, 4.722065167564627, 5.467931267932586, 6.193352259941968};
  for (int n = 1; n <= 9; ++n) EXPECT_NEAR(c.rows[n - 1].H, golden[n - 1], 1e-12);
  for (int n = 5; n <= 9; ++n) EXPECT_GE(c.rows[n - 1].H_per_n, c.rows[n - 2].H_per_n);
  EXPECT_NEAR(c.rows[8].H_per_n, 0.6881502511046631, 1e-9);
  const auto vals = c.values();
  EXPECT_LE(quasi_monotonicity_gap(vals), 1e-9);
}

TEST(Curve, GridDensityMatchesBlock) {
  // density 2 on the anti-diagonal cells is the block permuton of 21
  const GridDensityPermuton g(2, {0.0, 2.0, 2.0, 0.0});
  const BlockPermuton b(Permutation::parse("21"));
  for (int n = 1; n <= 4; ++n) {
    const auto dg = exact_grid_distribution(g, n);
    const auto db = exact_block_distribution(b, n);
    for (std::uint64_t r = 0; r < factorial_u64(n); ++r)
      EXPECT_NEAR(dg.probability_of_rank(r), db.probability_of_rank(r), 1e-14);
  }
}

TEST(Exact, TreeHasNoExactPath) {
  const PermutonModel t = TreePermuton{TreeRealizationHandle(1, PermutationLaw::uniform(2), GapMode::Equal)};
  EXPECT_THROW(exact_distribution(t, 3), ValidationError);
}
