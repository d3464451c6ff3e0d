#include "permuton/decay.hpp"

#include <algorithm>
#include <cmath>

#include "permuton/error.hpp"
#include "permuton/kahan.hpp"

namespace permuton {

namespace {

// Kullback-Leibler divergence of Bernoulli(a) from Bernoulli(q).
double kl_bernoulli(double a, double q) {
  double v = 0.0;
  if (a > 0.0) v += a * std::log(a / q);
  if (a < 1.0) v += (1.0 - a) * std::log((1.0 - a) / (1.0 - q));
  return v;
}

constexpr int kProductFormMaxN = 60;

}  // namespace

BinomialWindow BinomialWindow::compute(int n, double q, double c, double tail_target) {
  if (n < 0) throw ValidationError("BinomialWindow: n must be >= 0");
  if (!(q > 0.0 && q < 1.0)) throw ValidationError("BinomialWindow: q must be in (0,1)");
  BinomialWindow w;
  if (n <= kProductFormMaxN) {
    w.lo = 0;
    w.hi = n;
    w.pmf.resize(n + 1);
    double binom = 1.0;
    for (int k = 0; k <= n; ++k) {
      if (k > 0) binom = binom * (n - k + 1) / k;
      w.pmf[k] = binom * std::pow(q, k) * std::pow(1.0 - q, n - k);
    }
    return w;
  }
  const double mean = n * q;
  const double sigma = std::sqrt(n * q * (1.0 - q));
  int lo = std::max(0, static_cast<int>(std::floor(mean - c * sigma)));
  int hi = std::min(n, static_cast<int>(std::ceil(mean + c * sigma)));
  const int step = std::max(1, static_cast<int>(sigma));
  auto upper_tail = [&](int h) { return h >= n ? 0.0 : std::exp(-n * kl_bernoulli(static_cast<double>(h + 1) / n, q)); };
  auto lower_tail = [&](int l) { return l <= 0 ? 0.0 : std::exp(-n * kl_bernoulli(static_cast<double>(l - 1) / n, q)); };
  while (upper_tail(hi) > tail_target) hi = std::min(n, hi + step);
  while (lower_tail(lo) > tail_target) lo = std::max(0, lo - step);
  w.lo = lo;
  w.hi = hi;
  w.tail_bound = upper_tail(hi) + lower_tail(lo);
  w.pmf.assign(hi - lo + 1, 0.0);
  // Unnormalized pmf by running ratios from the mode, then normalized to the
  // window mass 1 - (excluded mass); the excluded mass is below tail_bound.
  int mode = std::clamp(static_cast<int>(std::floor((n + 1) * q)), lo, hi);
  const double up = q / (1.0 - q);
  w.pmf[mode - lo] = 1.0;
  for (int k = mode; k < hi; ++k) w.pmf[k + 1 - lo] = w.pmf[k - lo] * (static_cast<double>(n - k) / (k + 1)) * up;
  for (int k = mode; k > lo; --k) w.pmf[k - 1 - lo] = w.pmf[k - lo] * (static_cast<double>(k) / (n - k + 1)) / up;
  KahanSum s;
  for (double v : w.pmf) s.add(v);
  const double scale = 1.0 / s.value();
  for (double& v : w.pmf) v *= scale;
  return w;
}

std::vector<DecayTable> binomial_decay_tables(double q, int l_max, int N) {
  if (!(q > 0.0 && q < 1.0)) throw ValidationError("binomial_decay_table: q must be in (0,1)");
  if (l_max < 1) throw ValidationError("binomial_decay_table: l must be >= 1");
  if (N < l_max) throw ValidationError("binomial_decay_table: N must be >= l");
  std::vector<DecayTable> tables(l_max);
  for (int l = 1; l <= l_max; ++l) {
    tables[l - 1].params = {q, l};
    tables[l - 1].delta.assign(N + 1, 0.0);
    tables[l - 1].delta[l] = 1.0;
  }
  for (int n = 2; n <= N; ++n) {
    const BinomialWindow w = BinomialWindow::compute(n, q);
    const double stay = 1.0 - std::pow(q, n);
    const int lmax_here = std::min(l_max, n - 1);
    for (int l = 1; l <= lmax_here; ++l) {
      auto& t = tables[l - 1];
      KahanSum s;
      const int k0 = std::max(w.lo, l);
      const int k1 = std::min(w.hi, n - 1);
      for (int k = k0; k <= k1; ++k) s.add(w.pmf[k - w.lo] * t.delta[k]);
      t.delta[n] = s.value() / stay;
      t.error_ledger += w.tail_bound / stay;
    }
  }
  return tables;
}

DecayTable binomial_decay_table(DecayParams params, int N) {
  if (params.l < 1) throw ValidationError("binomial_decay_table: l must be >= 1");
  if (N < params.l) throw ValidationError("binomial_decay_table: N must be >= l");
  if (!(params.q > 0.0 && params.q < 1.0)) throw ValidationError("binomial_decay_table: q must be in (0,1)");
  DecayTable t;
  t.params = params;
  t.delta.assign(N + 1, 0.0);
  t.delta[params.l] = 1.0;
  for (int n = params.l + 1; n <= N; ++n) {
    const BinomialWindow w = BinomialWindow::compute(n, params.q);
    const double stay = 1.0 - std::pow(params.q, n);
    KahanSum s;
    const int k0 = std::max(w.lo, params.l);
    const int k1 = std::min(w.hi, n - 1);
    for (int k = k0; k <= k1; ++k) s.add(w.pmf[k - w.lo] * t.delta[k]);
    t.delta[n] = s.value() / stay;
    t.error_ledger += w.tail_bound / stay;
  }
  return t;
}

double tied_winner_probability(const DecayTable& table, int n) {
  if (n < 0 || n >= static_cast<int>(table.delta.size())) throw ValidationError("tied_winner_probability: n outside table");
  const double q = table.params.q;
  const int l = table.params.l;
  return std::pow(1.0 - q, l) / (1.0 - std::pow(q, l)) * table.delta[n];
}

double AlphaTable::beta(int n) const {
  if (n <= 0) return 0.0;
  return static_cast<double>(l) * alpha.at(n) / n;
}

AlphaTable alpha_equal_table(int d, int l, int N) {
  if (d < 2) throw ValidationError("alpha_equal_table: d must be >= 2");
  if (l < 1) throw ValidationError("alpha_equal_table: l must be >= 1");
  if (N > kMaxAlphaN) throw CapExceeded("alpha_equal_table: N above cap 1e5");
  AlphaTable t{d, l, GapMode::Equal, std::vector<double>(std::max(N, l) + 1, 0.0), 0.0};
  t.alpha[l] = 1.0;
  const double q = 1.0 / d;
  double max_alpha = 1.0;
  for (int n = l + 1; n <= N; ++n) {
    const BinomialWindow w = BinomialWindow::compute(n, q);
    const double factor = d / (1.0 - std::pow(q, n - 1));
    KahanSum s;
    const int k0 = std::max(w.lo, l);
    const int k1 = std::min(w.hi, n - 1);
    for (int k = k0; k <= k1; ++k) s.add(w.pmf[k - w.lo] * t.alpha[k]);
    t.alpha[n] = factor * s.value();
    t.error_ledger += factor * w.tail_bound * max_alpha;
    max_alpha = std::max(max_alpha, t.alpha[n]);
  }
  return t;
}

namespace {

double binomial_double(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

}  // namespace

AlphaTable alpha_uniform_table(int d, int l, int N) {
  if (d < 2) throw ValidationError("alpha_uniform_table: d must be >= 2");
  if (l < 1) throw ValidationError("alpha_uniform_table: l must be >= 1");
  if (N > kMaxAlphaN) throw CapExceeded("alpha_uniform_table: N above cap 1e5");
  AlphaTable t{d, l, GapMode::UniformGaps, std::vector<double>(std::max(N, l) + 1, 0.0), 0.0};
  // P[j] = j-fold iterated prefix sum of alpha up to the previous n, so that
  // sum_{k<=n} C(n-k+d-2, d-2) alpha(k) = P[1]+...+P[d-1] + alpha(n).
  std::vector<double> P(d, 0.0);
  for (int n = 0; n <= static_cast<int>(t.alpha.size()) - 1; ++n) {
    double a = 0.0;
    if (n == l) {
      a = 1.0;
    } else if (n > l) {
      double Q = 0.0;
      for (int j = 1; j <= d - 1; ++j) Q += P[j];
      a = d * Q / (binomial_double(n + d - 1, d - 1) - d);
    }
    t.alpha[n] = a;
    double carry = a;
    for (int j = 1; j <= d - 1; ++j) {
      P[j] += carry;
      carry = P[j];
    }
  }
  return t;
}

double equal_recurrence_linear_residual(int d, int N) {
  const double q = 1.0 / d;
  double worst = 0.0;
  for (int n = 2; n <= N; ++n) {
    const BinomialWindow w = BinomialWindow::compute(n, q);
    const double factor = d / (1.0 - std::pow(q, n - 1));
    KahanSum s;
    for (int k = w.lo; k <= std::min(w.hi, n - 1); ++k) s.add(w.pmf[k - w.lo] * k);
    worst = std::max(worst, std::abs(factor * s.value() - n) / n);
  }
  return worst;
}

double uniform_recurrence_linear_residual(int d, int N) {
  double worst = 0.0;
  std::vector<double> P(d, 0.0);
  for (int n = 0; n <= N; ++n) {
    if (n >= 2) {
      double Q = 0.0;
      for (int j = 1; j <= d - 1; ++j) Q += P[j];
      const double lhs = n * (binomial_double(n + d - 1, d - 1) - d);
      worst = std::max(worst, std::abs(lhs - d * Q) / (d * Q));
    }
    double carry = n;
    for (int j = 1; j <= d - 1; ++j) {
      P[j] += carry;
      carry = P[j];
    }
  }
  return worst;
}

MonteCarloValue partition_decay_expected_counts(int d, int l, int n, int sims, Rng& rng) {
  if (d < 2 || d > kMaxArity) throw ValidationError("partition_decay_expected_counts: d out of range");
  if (l < 1 || n < 1 || sims < 2) throw ValidationError("partition_decay_expected_counts: need l, n >= 1 and sims >= 2");
  double sum = 0.0;
  double sum2 = 0.0;
  std::vector<int> stack;
  std::vector<double> cut(d + 1);
  std::vector<int> counts(d);
  for (int s = 0; s < sims; ++s) {
    int found = n == l ? 1 : 0;
    stack.assign(1, n);
    while (!stack.empty()) {
      const int size = stack.back();
      stack.pop_back();
      if (size <= 1) continue;
      for (;;) {
        cut[0] = 0.0;
        cut[d] = 1.0;
        for (int j = 1; j < d; ++j) cut[j] = rng.uniform();
        std::sort(cut.begin() + 1, cut.begin() + d);
        std::fill(counts.begin(), counts.end(), 0);
        for (int p = 0; p < size; ++p) {
          const double u = rng.uniform();
          int i = 0;
          while (i < d - 1 && u >= cut[i + 1]) ++i;
          ++counts[i];
        }
        if (*std::max_element(counts.begin(), counts.end()) < size) break;
      }
      for (int c : counts) {
        if (c == 0) continue;
        if (c == l) ++found;
        stack.push_back(c);
      }
    }
    sum += found;
    sum2 += static_cast<double>(found) * found;
  }
  const double mean = sum / sims;
  const double var = std::max(0.0, (sum2 - sims * mean * mean) / (sims - 1));
  return {mean, std::sqrt(var / sims)};
}

}  // namespace permuton
