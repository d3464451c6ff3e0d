#pragma once

#include <cstdint>
#include <vector>

#include "permuton/rng.hpp"
#include "permuton/tree.hpp"

namespace permuton {

// Binomial(n, q) pmf restricted to [lo, hi], with a bound on the excluded mass.
struct BinomialWindow {
  int lo = 0;
  int hi = 0;
  std::vector<double> pmf;  // pmf[k - lo]
  double tail_bound = 0.0;

  static BinomialWindow compute(int n, double q, double c = 12.0, double tail_target = 1e-16);
  double at(int k) const { return k < lo || k > hi ? 0.0 : pmf[k - lo]; }
};

struct DecayParams {
  double q;
  int l;
};

struct DecayTable {
  DecayParams params;
  std::vector<double> delta;  // delta[n], n = 0..N
  double error_ledger = 0.0;  // accumulated truncated binomial mass
};

DecayTable binomial_decay_table(DecayParams params, int N);

// delta_l(n) for every l = 1..l_max at once; tables[l-1].
std::vector<DecayTable> binomial_decay_tables(double q, int l_max, int N);

// (1-q)^l / (1-q^l) * delta_l(n)
double tied_winner_probability(const DecayTable& table, int n);

struct AlphaTable {
  int d = 2;
  int l = 1;
  GapMode mode = GapMode::Equal;
  std::vector<double> alpha;  // alpha[n], n = 0..N
  double error_ledger = 0.0;

  // l * alpha_l(n) / n
  double beta(int n) const;
};

constexpr int kMaxAlphaN = 100000;

AlphaTable alpha_equal_table(int d, int l, int N);
AlphaTable alpha_uniform_table(int d, int l, int N);

// Residual of a(n) = n under the equal-gap recurrence, max relative over 2..N.
double equal_recurrence_linear_residual(int d, int N);
// Same for the uniform-gap recurrence.
double uniform_recurrence_linear_residual(int d, int N);

struct MonteCarloValue {
  double mean;
  double stderr_;
};

// Simple partition decay: n stones, d-1 uniform bars per interval, repeat
// until singletons. Estimates the expected number of length-l intervals.
MonteCarloValue partition_decay_expected_counts(int d, int l, int n, int sims, Rng& rng);

}  // namespace permuton
