#include "permuton/estimator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <random>
#include <thread>
#include <unordered_map>

#include <boost/math/distributions/students_t.hpp>

#include "permuton/error.hpp"

namespace permuton {

std::string to_string(EntropyMethod m) { return m == EntropyMethod::Plugin ? "plugin" : "miller_madow"; }

EntropyMethod entropy_method_from_string(const std::string& s) {
  if (s == "plugin") return EntropyMethod::Plugin;
  if (s == "miller_madow" || s == "miller-madow") return EntropyMethod::MillerMadow;
  throw ValidationError("unknown entropy method '" + s + "' (expected plugin or miller_madow)");
}

double plugin_entropy(std::span<const std::uint64_t> counts) {
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) throw ValidationError("plugin_entropy: no samples");
  const double N = static_cast<double>(total);
  double s = 0.0;
  for (auto c : counts) {
    if (c > 0) s += static_cast<double>(c) * std::log(static_cast<double>(c));
  }
  return std::max(0.0, std::log(N) - s / N);
}

namespace {
std::vector<std::uint64_t> count_values(const PatternCounts& c) {
  std::vector<std::uint64_t> v;
  v.reserve(c.counts.size());
  for (const auto& kv : c.counts) v.push_back(kv.second);
  return v;
}
}  // namespace

double plugin_entropy(const PatternCounts& c) { return plugin_entropy(count_values(c)); }

double miller_madow(std::span<const std::uint64_t> counts) {
  std::uint64_t total = 0;
  std::uint64_t distinct = 0;
  for (auto c : counts) {
    total += c;
    distinct += c > 0;
  }
  return plugin_entropy(counts) + (static_cast<double>(distinct) - 1.0) / (2.0 * static_cast<double>(total));
}

double miller_madow(const PatternCounts& c) { return miller_madow(count_values(c)); }

namespace {

class CountTable {
 public:
  explicit CountTable(int n) {
    if (n <= 9) dense_.assign(factorial_u64(n), 0);
  }
  void add(std::uint64_t rank, std::uint64_t c = 1) {
    if (!dense_.empty()) {
      dense_[rank] += c;
    } else {
      sparse_[rank] += c;
    }
  }
  void merge_into(PatternCounts& out) const {
    if (!dense_.empty()) {
      for (std::size_t r = 0; r < dense_.size(); ++r) {
        if (dense_[r]) out.counts[r] += dense_[r];
      }
    } else {
      for (const auto& kv : sparse_) out.counts[kv.first] += kv.second;
    }
  }

 private:
  std::vector<std::uint64_t> dense_;
  std::unordered_map<std::uint64_t, std::uint64_t> sparse_;
};

// Runs fn(i) for i in [0, count) on up to `threads` workers.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(count);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

void check_budget(int n, const EstimateOptions& opt) {
  if (n < 1) throw ValidationError("entropy estimation: n must be >= 1");
  if (n > kMaxUnbiasedN && !opt.allow_biased) {
    throw CapExceeded("entropy estimation: n = " + std::to_string(n) + " above " + std::to_string(kMaxUnbiasedN) +
                      " gives a severely biased plug-in estimate; pass allow_biased to override");
  }
  if (n > kMaxDistributionLength) throw CapExceeded("entropy estimation: n above 12");
}

double apply_method(EntropyMethod m, std::span<const std::uint64_t> counts) {
  return m == EntropyMethod::Plugin ? plugin_entropy(counts) : miller_madow(counts);
}

}  // namespace

PatternCounts sample_pattern_counts(const PermutonModel& mu, int n, std::uint64_t N, Rng& rng,
                                    const EstimateOptions& opt) {
  check_budget(n, opt);
  if (N == 0) throw ValidationError("sample_pattern_counts: N must be >= 1");
  const Rng base = rng.split(rng());
  const std::uint64_t chunk = std::max<std::uint64_t>(1, opt.chunk_size);
  const std::size_t chunks = static_cast<std::size_t>((N + chunk - 1) / chunk);
  PatternCounts out;
  out.n = n;
  out.total = N;
  const int workers = std::max(1, std::min<int>(opt.threads, static_cast<int>(chunks)));
  std::mutex merge_mutex;
  parallel_for(chunks, workers, [&](std::size_t c) {
    PatternSampler sampler(mu);
    CountTable local(n);
    Rng r = base.split(c);
    const std::uint64_t m = std::min<std::uint64_t>(chunk, N - c * chunk);
    for (std::uint64_t i = 0; i < m; ++i) local.add(lehmer_rank(sampler.draw(n, r)));
    std::lock_guard<std::mutex> lock(merge_mutex);
    local.merge_into(out);
  });
  return out;
}

EntropyEstimate estimate_sampling_entropy(const PermutonModel& mu, int n, std::uint64_t N, Rng& rng,
                                          EntropyMethod method, const EstimateOptions& opt) {
  const PatternCounts counts = sample_pattern_counts(mu, n, N, rng, opt);
  const std::vector<std::uint64_t> values = count_values(counts);
  EntropyEstimate e;
  e.n = n;
  e.method = method;
  e.sample_count = N;
  e.distinct_patterns = values.size();
  e.value = apply_method(method, values);
  if (opt.bootstrap_resamples > 1) {
    Rng boot(rng.seed() ^ 0xB007ULL, hash_combine(rng.stream(), rng()));
    std::vector<std::uint64_t> resample(values.size());
    double sum = 0.0;
    double sum2 = 0.0;
    for (int b = 0; b < opt.bootstrap_resamples; ++b) {
      // multinomial resample by sequential conditional binomials
      std::uint64_t left = N;
      double mass_left = 1.0;
      for (std::size_t i = 0; i < values.size(); ++i) {
        const double p = static_cast<double>(values[i]) / static_cast<double>(N);
        std::uint64_t k = left;
        if (i + 1 < values.size() && left > 0) {
          const double cond = std::clamp(p / mass_left, 0.0, 1.0);
          std::binomial_distribution<std::uint64_t> bd(left, cond);
          k = bd(boot);
        }
        resample[i] = k;
        left -= k;
        mass_left -= p;
        if (mass_left <= 0.0) mass_left = 1e-300;
      }
      const double v = apply_method(method, resample);
      sum += v;
      sum2 += v * v;
    }
    const double B = opt.bootstrap_resamples;
    const double mean = sum / B;
    e.stderr_ = std::sqrt(std::max(0.0, (sum2 - B * mean * mean) / (B - 1.0)));
  }
  return e;
}

MeanEntropyEstimate estimate_mean_entropy(const PermutationLaw& law, GapMode mode, int n, int realizations,
                                          std::uint64_t samples, Rng& rng, EntropyMethod method,
                                          const EstimateOptions& opt) {
  check_budget(n, opt);
  if (realizations < 2) throw ValidationError("estimate_mean_entropy: need at least 2 realizations");
  const Rng base = rng.split(rng());
  MeanEntropyEstimate out;
  out.n = n;
  out.realization_count = realizations;
  out.per_realization.assign(realizations, 0.0);
  out.realization_seeds.assign(realizations, 0);
  EstimateOptions inner = opt;
  inner.threads = 1;
  inner.bootstrap_resamples = 0;
  parallel_for(static_cast<std::size_t>(realizations), opt.threads, [&](std::size_t r) {
    Rng local = base.split(r);
    const std::uint64_t seed = local();
    PermutonModel mu = TreePermuton{TreeRealizationHandle(seed, law, mode)};
    out.realization_seeds[r] = seed;
    out.per_realization[r] = estimate_sampling_entropy(mu, n, samples, local, method, inner).value;
  });
  double sum = 0.0;
  for (double v : out.per_realization) sum += v;
  const double R = realizations;
  out.mean = sum / R;
  double ss = 0.0;
  for (double v : out.per_realization) ss += (v - out.mean) * (v - out.mean);
  const double sd = std::sqrt(ss / (R - 1.0));
  const boost::math::students_t dist(R - 1.0);
  const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
  out.ci_radius = t * sd / std::sqrt(R);
  out.spread_per_n = sd / n;
  return out;
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

std::vector<double> rho_recurrence_weights(int d, GapMode mode, int n) {
  if (d < 2 || n < 2) throw ValidationError("rho_recurrence_weights: need d >= 2 and n >= 2");
  std::vector<double> w(n, 0.0);
  if (mode == GapMode::Equal) {
    const double denom = std::pow(static_cast<double>(d), n - 1) - 1.0;
    for (int k = 0; k < n; ++k) w[k] = binomial_double(n, k) * std::pow(d - 1.0, n - k) / denom;
  } else {
    const double total = binomial_double(n + d - 1, d - 1);
    const double stay = 1.0 - d / total;
    for (int k = 0; k < n; ++k) w[k] = d * binomial_double(n - k + d - 2, d - 2) / total / stay;
  }
  return w;
}

RhoSequence implied_rho(std::span<const double> mean_curve, std::span<const double> ci, int d, GapMode mode) {
  if (!ci.empty() && ci.size() != mean_curve.size()) throw ValidationError("implied_rho: ci length must match curve");
  RhoSequence rho;
  rho.values.assign(mean_curve.size(), 0.0);
  rho.radius.assign(mean_curve.size(), 0.0);
  auto ci_at = [&](std::size_t k) { return ci.empty() ? 0.0 : ci[k]; };
  for (std::size_t n = 2; n < mean_curve.size(); ++n) {
    const auto w = rho_recurrence_weights(d, mode, static_cast<int>(n));
    double v = mean_curve[n];
    double r = ci_at(n);
    for (std::size_t k = 0; k < n; ++k) {
      v -= w[k] * mean_curve[k];
      r += std::abs(w[k]) * ci_at(k);
    }
    rho.values[n] = v;
    rho.radius[n] = r;
  }
  return rho;
}

double rho_upper_bound(int d, int n) { return 2.0 * d * d * std::log(static_cast<double>(n)); }

}  // namespace permuton
