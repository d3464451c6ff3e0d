#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "permuton/error.hpp"
#include "permuton/permutation.hpp"
#include "permuton/rng.hpp"

using namespace permuton;

namespace {

Permutation random_perm(int n, Rng& rng) {
  std::vector<int> v(n);
  std::iota(v.begin(), v.end(), 1);
  for (int i = n - 1; i > 0; --i) std::swap(v[i], v[rng.below(i + 1)]);
  return Permutation(v);
}

std::uint64_t brute_count(const Permutation& pi, const Permutation& sigma) {
  const int n = pi.size(), k = sigma.size();
  std::vector<bool> mask(n, false);
  std::fill(mask.begin(), mask.begin() + k, true);
  std::uint64_t c = 0;
  do {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (mask[i]) idx.push_back(i + 1);
    c += restrict(pi, idx) == sigma;
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return c;
}

}  // namespace

TEST(Permutation, ParseAndPrint) {
  EXPECT_EQ(Permutation::parse("3142").entries(), (std::vector<int>{3, 1, 4, 2}));
  EXPECT_EQ(Permutation::parse("3142").to_string(), "3142");
  const auto big = Permutation::parse("10,1,2,3,4,5,6,7,8,9");
  EXPECT_EQ(big.size(), 10);
  EXPECT_EQ(big.to_string(), "10,1,2,3,4,5,6,7,8,9");
  EXPECT_THROW(Permutation::parse("3143"), ValidationError);
  EXPECT_THROW(Permutation(std::vector<int>{0, 1}), ValidationError);
}

TEST(Permutation, RankRoundTrip) {
  for (int n = 1; n <= 6; ++n) {
    for (std::uint64_t r = 0; r < factorial_u64(n); ++r) EXPECT_EQ(Permutation::from_rank(n, r).rank(), r);
  }
  EXPECT_EQ(Permutation::identity(5).rank(), 0u);
  EXPECT_EQ(Permutation::parse("54321").rank(), 119u);
}

TEST(Permutation, Symmetries) {
  const auto p = Permutation::parse("2413");
  EXPECT_EQ(p.reversed().to_string(), "3142");
  EXPECT_EQ(p.complemented().to_string(), "3142");
  EXPECT_EQ(p.inverse().to_string(), "3142");
  EXPECT_EQ(p.inverse().inverse(), p);
}

TEST(Permutation, Standardize) {
  const std::vector<double> v{0.7, 0.1, 0.9, 0.3};
  EXPECT_EQ(standardize(v).to_string(), "3142");
  const std::vector<double> tie{0.5, 0.5};
  EXPECT_THROW(standardize(tie), CollisionError);
  const std::vector<Point> pts{{0.9, 0.2}, {0.1, 0.5}, {0.5, 0.1}};
  EXPECT_EQ(pattern_of_points(pts).to_string(), "312");
}

TEST(Permutation, Substitute) {
  const std::vector<Permutation> blocks{Permutation::parse("12"), Permutation::parse("21")};
  EXPECT_EQ(substitute(Permutation::parse("21"), blocks).to_string(), "3421");
  const std::vector<Permutation> three{Permutation::parse("1"), Permutation::parse("21"), Permutation::parse("1")};
  EXPECT_EQ(substitute(Permutation::parse("231"), three).to_string(), "2431");
}

TEST(Permutation, SubstituteRestrictInverse) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 1 + static_cast<int>(rng.below(4));
    const Permutation sigma = random_perm(m, rng);
    std::vector<Permutation> blocks;
    for (int i = 0; i < m; ++i) blocks.push_back(random_perm(1 + static_cast<int>(rng.below(3)), rng));
    const Permutation pi = substitute(sigma, blocks);
    // positions of block i in the inflation are contiguous in x
    int start = 1;
    for (int i = 0; i < m; ++i) {
      std::vector<int> idx(blocks[i].size());
      std::iota(idx.begin(), idx.end(), start);
      EXPECT_EQ(restrict(pi, idx), blocks[i]);
      start += blocks[i].size();
    }
  }
}

TEST(Permutation, RestrictValidatesIndices) {
  const auto p = Permutation::parse("4231");
  EXPECT_EQ(restrict(p, std::vector<int>{1, 4}).to_string(), "21");
  EXPECT_THROW(restrict(p, std::vector<int>{2, 2}), ValidationError);
  EXPECT_THROW(restrict(p, std::vector<int>{0, 1}), ValidationError);
}

TEST(Permutation, OccurrenceCountMatchesBruteForce) {
  Rng rng(3);
  for (int trial = 0; trial < 60; ++trial) {
    const Permutation pi = random_perm(4 + static_cast<int>(rng.below(6)), rng);
    const Permutation sigma = random_perm(1 + static_cast<int>(rng.below(4)), rng);
    EXPECT_EQ(count_occurrences(pi, sigma), brute_count(pi, sigma)) << pi.to_string() << " " << sigma.to_string();
    EXPECT_EQ(contains_pattern(pi, sigma), brute_count(pi, sigma) > 0);
  }
}

TEST(Permutation, DensitiesSumToOne) {
  const auto pi = Permutation::parse("3517246");
  for (int k = 1; k <= 4; ++k) {
    double s = 0.0;
    for (std::uint64_t r = 0; r < factorial_u64(k); ++r) s += pattern_density(pi, Permutation::from_rank(k, r));
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(PatternDistribution, Validation) {
  EXPECT_THROW(PatternDistribution(2, {{0, 0.5}, {1, 0.4}}), ValidationError);
  EXPECT_THROW(PatternDistribution(13, {}), CapExceeded);
  const auto u = PatternDistribution::uniform(3);
  EXPECT_EQ(u.support_size(), 6u);
  EXPECT_NEAR(u.probability(Permutation::parse("213")), 1.0 / 6, 1e-15);
  const auto pm = PatternDistribution::point_mass(Permutation::parse("21"));
  EXPECT_EQ(pm.support_size(), 1u);
  EXPECT_DOUBLE_EQ(pm.probability_of_rank(1), 1.0);
}
