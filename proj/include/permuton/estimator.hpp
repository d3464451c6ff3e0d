#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "permuton/fourier.hpp"
#include "permuton/models.hpp"
#include "permuton/rng.hpp"
#include "permuton/tree.hpp"

namespace permuton {

enum class EntropyMethod { Plugin, MillerMadow };

std::string to_string(EntropyMethod m);
EntropyMethod entropy_method_from_string(const std::string& s);

// Pattern counts keyed by Lehmer rank.
struct PatternCounts {
  int n = 0;
  std::map<std::uint64_t, std::uint64_t> counts;
  std::uint64_t total = 0;
};

double plugin_entropy(std::span<const std::uint64_t> counts);
double plugin_entropy(const PatternCounts& c);
double miller_madow(std::span<const std::uint64_t> counts);
double miller_madow(const PatternCounts& c);

struct EntropyEstimate {
  int n = 0;
  double value = 0.0;
  double stderr_ = 0.0;
  EntropyMethod method = EntropyMethod::Plugin;
  std::uint64_t sample_count = 0;
  std::uint64_t distinct_patterns = 0;

  double saturation() const {
    return sample_count ? static_cast<double>(distinct_patterns) / static_cast<double>(sample_count) : 0.0;
  }
};

// Above this n the plug-in bias is severe at desk budgets.
constexpr int kMaxUnbiasedN = 7;

struct EstimateOptions {
  int threads = 1;
  int bootstrap_resamples = 200;
  std::uint64_t chunk_size = std::uint64_t{1} << 14;
  bool allow_biased = false;
};

// Draws N patterns in fixed chunks; chunk c uses stream c of a generator
// derived from rng, so counts do not depend on the thread count.
PatternCounts sample_pattern_counts(const PermutonModel& mu, int n, std::uint64_t N, Rng& rng,
                                    const EstimateOptions& opt = {});

EntropyEstimate estimate_sampling_entropy(const PermutonModel& mu, int n, std::uint64_t N, Rng& rng,
                                          EntropyMethod method = EntropyMethod::Plugin,
                                          const EstimateOptions& opt = {});

struct MeanEntropyEstimate {
  int n = 0;
  double mean = 0.0;
  double ci_radius = 0.0;  // 95% t-interval
  int realization_count = 0;
  std::vector<double> per_realization;
  std::vector<std::uint64_t> realization_seeds;
  double spread_per_n = 0.0;  // sample sd of H_n / n across realizations
};

// Quenched mean: fresh realization per outer draw, within-realization entropy.
MeanEntropyEstimate estimate_mean_entropy(const PermutationLaw& law, GapMode mode, int n, int realizations,
                                          std::uint64_t samples, Rng& rng,
                                          EntropyMethod method = EntropyMethod::Plugin,
                                          const EstimateOptions& opt = {});

// Coefficients w(n, k), k < n, with y_n = rho_n + sum_k w(n,k) y_k.
std::vector<double> rho_recurrence_weights(int d, GapMode mode, int n);

// mean_curve[n] = E H_n for n = 0..n_max (entries 0 and 1 are 0); ci[n] the
// matching radii (may be empty).
RhoSequence implied_rho(std::span<const double> mean_curve, std::span<const double> ci, int d, GapMode mode);

// 2 d^2 log n
double rho_upper_bound(int d, int n);

}  // namespace permuton
