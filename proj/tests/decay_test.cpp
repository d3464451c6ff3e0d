#include <gtest/gtest.h>

#include <cmath>

#include "permuton/decay.hpp"
#include "permuton/error.hpp"
#include "permuton/profile.hpp"

using namespace permuton;

TEST(BinomialWindow, MassAndTail) {
  for (int n : {1, 10, 60, 61, 1000, 100000}) {
    for (double q : {0.5, 1.0 / 3, 0.1}) {
      const auto w = BinomialWindow::compute(n, q);
      double s = 0.0;
      for (double p : w.pmf) s += p;
      EXPECT_NEAR(s, 1.0, 1e-12) << n << " " << q;
      EXPECT_LE(w.tail_bound, 1e-15);
      EXPECT_GE(w.lo, 0);
      EXPECT_LE(w.hi, n);
    }
  }
  const auto w = BinomialWindow::compute(4, 0.5);
  EXPECT_NEAR(w.at(2), 6.0 / 16, 1e-15);
}

TEST(Decay, BaseCasesAndSmallValues) {
  const auto t = binomial_decay_table({0.5, 1}, 100);
  EXPECT_EQ(t.delta[0], 0.0);
  EXPECT_EQ(t.delta[1], 1.0);
  EXPECT_NEAR(t.delta[2], 2.0 / 3, 1e-15);
  for (double v : t.delta) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  const auto t2 = binomial_decay_table({0.5, 2}, 10);
  EXPECT_EQ(t2.delta[1], 0.0);
  EXPECT_NEAR(tied_winner_probability(t2, 2), 1.0 / 3, 1e-15);
  EXPECT_NEAR(tied_winner_probability(t, 1), 1.0, 1e-15);
  EXPECT_THROW(binomial_decay_table({1.5, 1}, 10), ValidationError);
}

TEST(Decay, MultiTableMatchesSingle) {
  const auto all = binomial_decay_tables(0.3, 4, 500);
  for (int l = 1; l <= 4; ++l) {
    const auto one = binomial_decay_table({0.3, l}, 500);
    for (int n = 0; n <= 500; ++n) EXPECT_NEAR(all[l - 1].delta[n], one.delta[n], 1e-14);
  }
}

TEST(Decay, TiedWinnerSumsToOne) {
  const int N = 1000;
  const auto tables = binomial_decay_tables(0.5, 80, N);
  for (int n = 1; n <= N; ++n) {
    double s = 0.0;
    for (int l = 1; l <= std::min(n, 80); ++l) s += tied_winner_probability(tables[l - 1], n);
    ASSERT_NEAR(s, 1.0, 1e-10) << n;
  }
}

TEST(Decay, SimulatedTies) {
  // n players each stop with probability 1-q per round; the number tying at
  // the last stop is l with probability tied_winner_probability
  Rng rng(77);
  const int n = 5, sims = 200000;
  std::vector<int> hist(n + 1, 0);
  for (int s = 0; s < sims; ++s) {
    int alive = n;
    for (;;) {
      int next = 0;
      for (int i = 0; i < alive; ++i) next += rng.uniform() < 0.5;
      if (next == 0) {
        ++hist[alive];
        break;
      }
      alive = next;
    }
  }
  const auto tables = binomial_decay_tables(0.5, n, n);
  for (int l = 1; l <= n; ++l) {
    const double p = tied_winner_probability(tables[l - 1], n);
    EXPECT_NEAR(hist[l] / static_cast<double>(sims), p, 4 * std::sqrt(p * (1 - p) / sims)) << l;
  }
}

TEST(Decay, ErrorLedgerSmall) {
  const auto t = binomial_decay_table({0.5, 1}, 100000);
  EXPECT_LT(t.error_ledger, 1e-10);
}

TEST(Alpha, EqualShiftIdentity) {
  for (int d : {2, 3, 4}) {
    for (int l : {2, 3}) {
      const auto a = alpha_equal_table(d, l, 5000);
      const auto t = binomial_decay_table({1.0 / d, l - 1}, 4999);
      for (int n = l; n <= 5000; ++n) ASSERT_NEAR(a.beta(n), t.delta[n - 1], 1e-10) << d << " " << l << " " << n;
    }
  }
}

TEST(Alpha, LinearSolutions) {
  for (int d : {2, 3, 5}) {
    EXPECT_LT(equal_recurrence_linear_residual(d, 2000), 1e-9);
    EXPECT_LT(uniform_recurrence_linear_residual(d, 2000), 1e-9);
  }
}

TEST(Alpha, UniformTwoClosedForm) {
  // d = 2: alpha_l(n) = 2n / (l (l + 1)) for n > l
  for (int l = 1; l <= 20; ++l) {
    const auto a = alpha_uniform_table(2, l, 2000);
    EXPECT_EQ(a.alpha[l], 1.0);
    for (int n = 0; n < l; ++n) EXPECT_EQ(a.alpha[n], 0.0);
    for (int n = l + 1; n <= 2000; ++n) {
      ASSERT_NEAR(a.alpha[n] * l * (l + 1) / (2.0 * n), 1.0, 1e-10) << l << " " << n;
    }
  }
  EXPECT_NEAR(alpha_uniform_table(2, 3, 6).alpha[6] / 6, 1.0 / 6, 1e-15);
}

TEST(Alpha, SimulationAgreesWithTable) {
  Rng rng(31);
  const auto sim = partition_decay_expected_counts(2, 2, 6, 40000, rng);
  EXPECT_NEAR(sim.mean, alpha_uniform_table(2, 2, 6).alpha[6], 3 * sim.stderr_);
  EXPECT_NEAR(sim.mean, 2.0, 3 * sim.stderr_);
  const auto sim3 = partition_decay_expected_counts(3, 2, 8, 40000, rng);
  EXPECT_NEAR(sim3.mean, alpha_uniform_table(3, 2, 8).alpha[8], 3 * sim3.stderr_);
  const auto base = partition_decay_expected_counts(3, 4, 4, 100, rng);
  EXPECT_EQ(base.mean, 1.0);
}

TEST(Alpha, Caps) {
  EXPECT_THROW(alpha_uniform_table(2, 1, 100001), CapExceeded);
  EXPECT_THROW(alpha_equal_table(1, 1, 10), ValidationError);
}

TEST(Profile, ConstantAndLogPeriodic) {
  const auto grid = uniform_x_grid(64);
  const std::vector<int> ms{3, 4, 5, 6};
  const auto c = log_periodic_profile([](std::uint64_t) { return 0.7; }, 2.0, ms, grid, 1000);
  for (double dd : c.sup_distances) EXPECT_EQ(dd, 0.0);
  const double eta = 3.0;
  auto seq = [&](std::uint64_t n) { return std::sin(2 * M_PI * std::log(static_cast<double>(n)) / std::log(eta)); };
  const std::vector<int> big{8, 9, 10};
  const auto p = log_periodic_profile(seq, eta, big, grid, 200000);
  // floor(eta^(x+m)) perturbs x by at most 1/(eta^m log eta)
  for (double dd : p.sup_distances) EXPECT_LT(dd, 2 * M_PI * 2.0 / (std::pow(eta, 8) * std::log(eta)));
  EXPECT_THROW(log_periodic_profile(seq, eta, big, grid, 1000), ValidationError);
}

TEST(Profile, DecayDistancesShrink) {
  const auto t = binomial_decay_table({0.5, 1}, 65536);
  std::vector<int> ms;
  for (int m = 10; m <= 15; ++m) ms.push_back(m);
  const auto p = log_periodic_profile([&](std::uint64_t n) { return t.delta[n]; }, 2.0, ms, uniform_x_grid(256), 65536);
  for (std::size_t i = 1; i < p.sup_distances.size(); ++i) EXPECT_LT(p.sup_distances[i], p.sup_distances[i - 1]);
  for (int m = 10; m <= 16; ++m) EXPECT_NEAR(t.delta[1 << m], 0.72135, 2e-3);
}
