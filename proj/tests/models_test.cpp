#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "permuton/error.hpp"
#include "permuton/exact.hpp"
#include "permuton/models.hpp"

using namespace permuton;

namespace {

std::map<std::uint64_t, double> frequencies(const PermutonModel& mu, int n, int N, std::uint64_t seed) {
  Rng rng(seed);
  PatternSampler s(mu);
  std::map<std::uint64_t, double> f;
  for (int i = 0; i < N; ++i) f[lehmer_rank(s.draw(n, rng))] += 1.0 / N;
  return f;
}

double total_variation(const std::map<std::uint64_t, double>& emp, const PatternDistribution& exact) {
  double tv = 0.0;
  for (std::uint64_t r = 0; r < factorial_u64(exact.n()); ++r) {
    const auto it = emp.find(r);
    tv += std::abs((it == emp.end() ? 0.0 : it->second) - exact.probability_of_rank(r));
  }
  return tv / 2;
}

std::vector<PermutonModel> test_models() {
  std::vector<PermutonModel> v;
  v.emplace_back(LebesguePermuton{});
  v.emplace_back(BlockPermuton(Permutation::parse("21")));
  v.emplace_back(BlockPermuton(Permutation::parse("2413"), std::vector<double>{0.1, 0.2, 0.3, 0.4}));
  v.emplace_back(FunctionPermuton{PiecewiseAffineMap::doubling()});
  v.emplace_back(FunctionPermuton{PiecewiseAffineMap::tent()});
  v.emplace_back(GridDensityPermuton(2, {0.5, 1.5, 1.5, 0.5}));
  return v;
}

}  // namespace

TEST(Sampler, LebesgueIsUniform) {
  const int N = 100000;
  const auto f = frequencies(LebesguePermuton{}, 3, N, 1);
  const double sd = std::sqrt(1.0 / 6 * 5.0 / 6 / N);
  for (std::uint64_t r = 0; r < 6; ++r) EXPECT_NEAR(f.at(r), 1.0 / 6, 3 * sd);
}

TEST(Sampler, IdentityMapGivesIdentity) {
  Rng rng(2);
  const PermutonModel mu = FunctionPermuton{PiecewiseAffineMap::identity()};
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_pattern(mu, 6, rng), Permutation::identity(6));
}

TEST(Sampler, BlockTwentyOne) {
  const auto f = frequencies(BlockPermuton(Permutation::parse("21")), 2, 100000, 3);
  EXPECT_NEAR(f.at(1), 0.75, 3 * std::sqrt(0.75 * 0.25 / 1e5));
}

TEST(Sampler, MatchesExactDistributions) {
  const int N = 40000;
  for (const auto& mu : test_models()) {
    for (int n = 2; n <= 4; ++n) {
      const double tv = total_variation(frequencies(mu, n, N, 17 + n), exact_distribution(mu, n));
      EXPECT_LT(tv, 5.0 / std::sqrt(static_cast<double>(N))) << model_kind(mu) << " n=" << n;
    }
  }
}

TEST(RectMeasure, Examples) {
  EXPECT_DOUBLE_EQ(rect_measure(LebesguePermuton{}, 0, .5, 0, .5).value, 0.25);
  EXPECT_NEAR(rect_measure(FunctionPermuton{PiecewiseAffineMap::doubling()}, 0, .5, 0, .5).value, 0.25, 1e-15);
  EXPECT_NEAR(rect_measure(BlockPermuton(Permutation::parse("21")), 0, .5, 0, .5).value, 0.0, 1e-15);
  EXPECT_THROW(rect_measure(LebesguePermuton{}, 0.5, 0.2, 0, 1), ValidationError);
  EXPECT_THROW(rect_measure(LebesguePermuton{}, 0, 1, 0, 1.5), ValidationError);
}

TEST(RectMeasure, UniformMarginals) {
  auto models = test_models();
  models.emplace_back(TreePermuton{TreeRealizationHandle(5, PermutationLaw::uniform(2), GapMode::UniformGaps), 12});
  for (const auto& mu : models) {
    for (double a : {0.0, 0.13, 0.5}) {
      for (double b : {0.6, 0.77, 1.0}) {
        const auto xs = rect_measure(mu, a, b, 0, 1);
        const auto ys = rect_measure(mu, 0, 1, a, b);
        EXPECT_NEAR(xs.value, b - a, 1e-9 + xs.error_bound) << model_kind(mu);
        EXPECT_NEAR(ys.value, b - a, 1e-9 + ys.error_bound) << model_kind(mu);
      }
    }
  }
}

TEST(GridDensity, RejectsBadMarginals) {
  EXPECT_THROW(GridDensityPermuton(2, {2.0, 0.0, 1.0, 1.0}), ValidationError);
  EXPECT_THROW(GridDensityPermuton(2, {1.0, 1.0, 1.0}), ValidationError);
}

TEST(BoxDistance, Examples) {
  const PermutonModel leb = LebesguePermuton{};
  EXPECT_NEAR(box_distance(leb, leb, 16), 0.0, 1e-15);
  EXPECT_NEAR(box_distance(BlockPermuton(Permutation::parse("1")), leb, 16), 0.0, 1e-15);
  const double d = box_distance(FunctionPermuton{PiecewiseAffineMap::identity()}, leb, 64);
  EXPECT_NEAR(d, 0.25, 4.0 / 64);
  EXPECT_THROW(box_distance(leb, leb, 1), ValidationError);
}

TEST(BoxDistance, MatchesBruteForce) {
  const int g = 6;
  const auto a = grid_masses(FunctionPermuton{PiecewiseAffineMap::tent()}, g);
  const auto b = grid_masses(BlockPermuton(Permutation::parse("231")), g);
  double best = 0.0;
  for (int i1 = 0; i1 < g; ++i1)
    for (int i2 = i1 + 1; i2 <= g; ++i2)
      for (int j1 = 0; j1 < g; ++j1)
        for (int j2 = j1 + 1; j2 <= g; ++j2) {
          double s = 0.0;
          for (int i = i1; i < i2; ++i)
            for (int j = j1; j < j2; ++j) s += a[i * g + j] - b[i * g + j];
          best = std::max(best, std::abs(s));
        }
  EXPECT_NEAR(box_distance_from_masses(a, b, g), best, 1e-14);
}

TEST(BoxDistance, Pseudometric) {
  const auto models = test_models();
  const int g = 16;
  for (std::size_t i = 0; i < models.size(); ++i) {
    for (std::size_t j = 0; j < models.size(); ++j) {
      const double dij = box_distance(models[i], models[j], g);
      EXPECT_NEAR(dij, box_distance(models[j], models[i], g), 1e-14);
      for (std::size_t k = 0; k < models.size(); ++k) {
        EXPECT_LE(dij, box_distance(models[i], models[k], g) + box_distance(models[k], models[j], g) + 1e-14);
      }
    }
  }
}

TEST(BoxDistance, OscillatingApproximatorsConverge) {
  const auto f = PiecewiseAffineMap::tent();
  const PermutonModel limit = rectangle_union_limit(f, 32);
  const double d2 = box_distance(FunctionPermuton{make_oscillating_approximator(f, 2)}, limit, 32);
  const double d16 = box_distance(FunctionPermuton{make_oscillating_approximator(f, 16)}, limit, 32);
  EXPECT_LT(d16, d2);
}
