#include "permuton/tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <unordered_map>

#include "permuton/error.hpp"

namespace permuton {

std::string to_string(GapMode mode) {
  return mode == GapMode::Equal ? "equal" : "uniform";
}

GapMode gap_mode_from_string(const std::string& s) {
  if (s == "equal") return GapMode::Equal;
  if (s == "uniform" || s == "uniform-gaps" || s == "uniform_gaps") return GapMode::UniformGaps;
  throw ValidationError("unknown gap mode '" + s + "' (expected equal or uniform)");
}

PermutationLaw::PermutationLaw(int d, std::vector<std::pair<Permutation, double>> weights)
    : d_(d) {
  if (d < 2 || d > kMaxArity) {
    throw ValidationError("PermutationLaw: arity must be in [2, " + std::to_string(kMaxArity) + "]");
  }
  std::map<Permutation, double> merged;
  for (auto& [pi, w] : weights) {
    if (pi.size() != d) throw ValidationError("PermutationLaw: permutation " + pi.to_string() + " is not in Sym(d)");
    if (!(w >= 0.0)) throw ValidationError("PermutationLaw: negative weight");
    merged[pi] += w;
  }
  double total = 0.0;
  for (const auto& kv : merged) total += kv.second;
  if (std::abs(total - 1.0) > 1e-9) throw ValidationError("PermutationLaw: weights sum to " + std::to_string(total));
  double acc = 0.0;
  for (const auto& [pi, w] : merged) {
    if (w <= 0.0) continue;
    support_.push_back(pi);
    probs_.push_back(w);
    acc += w;
    cumulative_.push_back(acc);
    std::array<int, kMaxArity> inv{};
    for (int i = 0; i < d; ++i) inv[pi[i] - 1] = i;
    inverses_.push_back(inv);
  }
  if (support_.empty()) throw ValidationError("PermutationLaw: empty support");
  cumulative_.back() = 1.0;
}

PermutationLaw PermutationLaw::uniform(int d) {
  if (d < 2 || d > 8) throw ValidationError("PermutationLaw::uniform: d must be in [2, 8]");
  const std::uint64_t nf = factorial_u64(d);
  std::vector<std::pair<Permutation, double>> w;
  for (std::uint64_t r = 0; r < nf; ++r) w.emplace_back(Permutation::from_rank(d, r), 1.0 / static_cast<double>(nf));
  return PermutationLaw(d, std::move(w));
}

PermutationLaw PermutationLaw::dirac(const Permutation& pi) {
  return PermutationLaw(pi.size(), {{pi, 1.0}});
}

int PermutationLaw::draw_index(double u) const {
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  return static_cast<int>(it - cumulative_.begin());
}

TreeRealizationHandle::TreeRealizationHandle(std::uint64_t seed, PermutationLaw law, GapMode mode)
    : seed_(seed), law_(std::move(law)), mode_(mode), root_(hash_combine(seed, 0x7472656572ULL)) {}

std::uint64_t TreeRealizationHandle::child_key(std::uint64_t key, int digit) {
  return hash_combine(key, static_cast<std::uint64_t>(digit) + 1);
}

std::uint64_t TreeRealizationHandle::key_of_path(std::span<const int> path) const {
  std::uint64_t k = root_;
  for (int digit : path) {
    if (digit < 0 || digit >= d()) throw ValidationError("key_of_path: digit out of range");
    k = child_key(k, digit);
  }
  return k;
}

int TreeRealizationHandle::label_index(std::uint64_t key) const {
  if (law_.support().size() == 1) return 0;
  return law_.draw_index(keyed_uniform(hash_combine(key, 0x6c6162656cULL)));
}

const Permutation& TreeRealizationHandle::label(std::uint64_t key) const {
  return law_.support()[label_index(key)];
}

void TreeRealizationHandle::gaps(std::uint64_t key, double* out) const {
  const int d = this->d();
  if (mode_ == GapMode::Equal) {
    for (int i = 0; i < d; ++i) out[i] = 1.0 / d;
    return;
  }
  std::array<double, kMaxArity + 1> u{};
  for (int j = 0; j < d - 1; ++j) u[j + 1] = keyed_uniform(hash_combine(key, 0x676170ULL + static_cast<std::uint64_t>(j)));
  std::sort(u.begin() + 1, u.begin() + d);
  u[0] = 0.0;
  u[d] = 1.0;
  for (int i = 0; i < d; ++i) out[i] = u[i + 1] - u[i];
}

TruncatedRealization realize_truncation(const TreeRealizationHandle& h, int depth) {
  const int d = h.d();
  if (depth < 0) throw ValidationError("realize_truncation: negative depth");
  std::size_t cells = 1;
  for (int i = 0; i < depth; ++i) {
    cells *= static_cast<std::size_t>(d);
    if (cells > kMaxTruncationCells) throw CapExceeded("realize_truncation: d^m above 2^20");
  }
  std::vector<std::uint64_t> keys{h.root_key()};
  std::vector<int> pi{1};
  std::vector<double> lengths{1.0};
  std::array<double, kMaxArity> g{};
  for (int level = 0; level < depth; ++level) {
    const std::size_t width = keys.size();
    std::vector<std::uint64_t> next_keys(width * d);
    std::vector<int> next_pi(width * d);
    std::vector<double> next_len(width * d);
    for (std::size_t j = 0; j < width; ++j) {
      const Permutation& a = h.label(keys[j]);
      h.gaps(keys[j], g.data());
      for (int i = 0; i < d; ++i) {
        next_keys[j * d + i] = TreeRealizationHandle::child_key(keys[j], i);
        next_pi[j * d + i] = (pi[j] - 1) * d + a[i];
        next_len[j * d + i] = lengths[j] * g[i];
      }
    }
    keys.swap(next_keys);
    pi.swap(next_pi);
    lengths.swap(next_len);
  }
  return {depth, Permutation(std::move(pi)), std::move(lengths)};
}

namespace {

class LazySampler {
 public:
  LazySampler(const TreeRealizationHandle& h, int n, Rng& rng)
      : h_(h), rng_(rng), d_(h.d()) {
    const double logd = n > 1 ? std::log(static_cast<double>(n)) / std::log(static_cast<double>(d_)) : 0.0;
    fuse_ = static_cast<int>(64.0 * logd) + 256;
  }

  void run(std::uint64_t key, int depth, int count, int* out) {
    if (count == 1) {
      out[0] = 1;
      return;
    }
    std::array<int, kMaxArity> k{};
    std::array<double, kMaxArity> cum{};
    for (;;) {
      if (depth > fuse_) {
        throw NumericalError("lazy tree sampler: depth fuse " + std::to_string(fuse_) +
                             " reached (probability ~0 event)");
      }
      std::fill(k.begin(), k.begin() + d_, 0);
      if (h_.mode() == GapMode::Equal) {
        for (int p = 0; p < count; ++p) ++k[rng_.below(static_cast<std::uint64_t>(d_))];
      } else {
        h_.gaps(key, cum.data());
        for (int i = 1; i < d_; ++i) cum[i] += cum[i - 1];
        cum[d_ - 1] = 1.0;
        for (int p = 0; p < count; ++p) {
          const double u = rng_.uniform();
          int i = 0;
          while (i < d_ - 1 && u >= cum[i]) ++i;
          ++k[i];
        }
      }
      int full = -1;
      for (int i = 0; i < d_; ++i) {
        if (k[i] == count) full = i;
      }
      if (full < 0) break;
      key = TreeRealizationHandle::child_key(key, full);
      ++depth;
    }
    const int li = h_.label_index(key);
    const auto& inv = h_.law().inverse_of(li);
    std::array<int, kMaxArity> offset{};
    int running = 0;
    for (int v = 0; v < d_; ++v) {
      offset[inv[v]] = running;
      running += k[inv[v]];
    }
    int pos = 0;
    for (int i = 0; i < d_; ++i) {
      if (k[i] == 0) continue;
      run(TreeRealizationHandle::child_key(key, i), depth + 1, k[i], out + pos);
      for (int t = 0; t < k[i]; ++t) out[pos + t] += offset[i];
      pos += k[i];
    }
  }

 private:
  const TreeRealizationHandle& h_;
  Rng& rng_;
  int d_;
  int fuse_;
};

}  // namespace

void sample_tree_pattern_into(const TreeRealizationHandle& h, int n, Rng& rng, int* out) {
  if (n < 1) throw ValidationError("sample_pattern_lazy: n must be >= 1");
  LazySampler(h, n, rng).run(h.root_key(), 0, n, out);
}

Permutation sample_pattern_lazy(const TreeRealizationHandle& h, int n, Rng& rng) {
  if (n < 1) throw ValidationError("sample_pattern_lazy: n must be >= 1");
  std::vector<int> out(n);
  sample_tree_pattern_into(h, n, rng, out.data());
  return Permutation(std::move(out));
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

std::vector<double> allocation_marginal(int d, int n, GapMode mode) {
  if (d < 2 || n < 0) throw ValidationError("allocation_marginal: need d >= 2, n >= 0");
  std::vector<double> p(n + 1);
  if (mode == GapMode::Equal) {
    const double q = 1.0 / d;
    for (int k = 0; k <= n; ++k) p[k] = binomial_double(n, k) * std::pow(q, k) * std::pow(1.0 - q, n - k);
  } else {
    const double denom = binomial_double(n + d - 1, d - 1);
    for (int k = 0; k <= n; ++k) p[k] = binomial_double(n - k + d - 2, d - 2) / denom;
  }
  return p;
}

double allocation_probability(std::span<const int> counts, GapMode mode) {
  const int d = static_cast<int>(counts.size());
  int n = 0;
  for (int c : counts) {
    if (c < 0) throw ValidationError("allocation_probability: negative count");
    n += c;
  }
  if (mode == GapMode::UniformGaps) return 1.0 / binomial_double(n + d - 1, d - 1);
  double p = 1.0;
  int remaining = n;
  for (int c : counts) {
    p *= binomial_double(remaining, c) * std::pow(1.0 / d, c);
    remaining -= c;
  }
  return p;
}

namespace {

// Every composition of n into d non-negative parts, in lexicographic order.
void for_each_composition(int n, int d, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> k(d, 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == d - 1) {
      k[i] = left;
      fn(k);
      return;
    }
    for (int c = 0; c <= left; ++c) {
      k[i] = c;
      rec(i + 1, left - c);
    }
  };
  rec(0, n);
}

template <typename Scalar>
Scalar to_scalar(double w);

template <>
double to_scalar<double>(double w) {
  return w;
}

template <>
Rational to_scalar<Rational>(double w) {
  return Rational(w);
}

template <typename Scalar>
Scalar integer_scalar(std::uint64_t v) {
  return Scalar(v);
}

template <typename Scalar>
class ExpectedDensity {
 public:
  ExpectedDensity(const PermutationLaw& law, GapMode mode) : law_(law), mode_(mode) {
    for (double w : law.probabilities()) weights_.push_back(to_scalar<Scalar>(w));
  }

  Scalar operator()(const Permutation& sigma) {
    const int n = sigma.size();
    if (n == 1) return Scalar(1);
    const auto key = std::make_pair(n, sigma.rank());
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    const int d = law_.d();
    Scalar rhs(0);
    Scalar stay(0);
    for_each_composition(n, d, [&](const std::vector<int>& k) {
      const Scalar pk = allocation(k, n);
      if (*std::max_element(k.begin(), k.end()) == n) {
        stay += pk;
        return;
      }
      // x-blocks in child order; check interval values and record block ranges
      std::vector<int> lo(d, 0), hi(d, 0);
      std::vector<Permutation> blocks(d);
      int pos = 0;
      for (int i = 0; i < d; ++i) {
        if (k[i] == 0) continue;
        int mn = n + 1, mx = 0;
        std::vector<int> vals;
        for (int t = 0; t < k[i]; ++t) {
          const int v = sigma[pos + t];
          mn = std::min(mn, v);
          mx = std::max(mx, v);
          vals.push_back(v);
        }
        if (mx - mn + 1 != k[i]) return;
        lo[i] = mn;
        hi[i] = mx;
        blocks[i] = standardize(std::span<const int>(vals));
        pos += k[i];
      }
      Scalar inner(1);
      for (int i = 0; i < d; ++i) {
        if (k[i] > 0) inner *= (*this)(blocks[i]);
      }
      if (inner == Scalar(0)) return;
      Scalar label_mass(0);
      const auto& support = law_.support();
      for (std::size_t a = 0; a < support.size(); ++a) {
        bool ok = true;
        for (int i = 0; i < d && ok; ++i) {
          if (k[i] == 0) continue;
          for (int j = i + 1; j < d && ok; ++j) {
            if (k[j] == 0) continue;
            ok = (lo[i] < lo[j]) == (support[a][i] < support[a][j]);
          }
        }
        if (ok) label_mass += weights_[a];
      }
      rhs += pk * label_mass * inner;
    });
    const Scalar value = rhs / (Scalar(1) - stay);
    memo_.emplace(key, value);
    return value;
  }

 private:
  Scalar allocation(const std::vector<int>& k, int n) const {
    const int d = law_.d();
    if (mode_ == GapMode::UniformGaps) {
      // 1 / C(n+d-1, d-1)
      std::uint64_t c = 1;
      for (int i = 1; i <= d - 1; ++i) c = c * static_cast<std::uint64_t>(n + i) / static_cast<std::uint64_t>(i);
      return Scalar(1) / integer_scalar<Scalar>(c);
    }
    std::uint64_t multinom = 1;
    int remaining = n;
    for (int c : k) {
      std::uint64_t b = 1;
      for (int i = 1; i <= c; ++i) b = b * static_cast<std::uint64_t>(remaining - c + i) / static_cast<std::uint64_t>(i);
      multinom *= b;
      remaining -= c;
    }
    Scalar denom(1);
    for (int i = 0; i < n; ++i) denom *= integer_scalar<Scalar>(static_cast<std::uint64_t>(d));
    return integer_scalar<Scalar>(multinom) / denom;
  }

  const PermutationLaw& law_;
  GapMode mode_;
  std::vector<Scalar> weights_;
  std::map<std::pair<int, std::uint64_t>, Scalar> memo_;
};

void check_density_caps(const Permutation& sigma) {
  if (sigma.size() > 6) throw CapExceeded("expected_pattern_density: |sigma| above 6");
}

}  // namespace

double expected_pattern_density(const PermutationLaw& law, const Permutation& sigma, GapMode mode) {
  check_density_caps(sigma);
  return ExpectedDensity<double>(law, mode)(sigma);
}

Rational expected_pattern_density_exact(const PermutationLaw& law, const Permutation& sigma,
                                        GapMode mode) {
  check_density_caps(sigma);
  return ExpectedDensity<Rational>(law, mode)(sigma);
}

namespace {

class ClassMembership {
 public:
  explicit ClassMembership(std::span<const Permutation> generators)
      : generators_(generators.begin(), generators.end()) {
    for (const auto& g : generators_) max_blocks_ = std::max(max_blocks_, g.size());
  }

  bool member(const Permutation& sigma) {
    const int n = sigma.size();
    if (n == 1) return true;
    const auto key = std::make_pair(n, sigma.rank());
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::vector<int> cuts{0};
    const bool result = search(sigma, cuts);
    memo_.emplace(key, result);
    return result;
  }

 private:
  // cuts holds block start positions; extends with every interval block
  // starting at cuts.back().
  bool search(const Permutation& sigma, std::vector<int>& cuts) {
    const int n = sigma.size();
    const int start = cuts.back();
    if (start == n) {
      const int blocks = static_cast<int>(cuts.size()) - 1;
      if (blocks < 2) return false;
      return accept(sigma, cuts);
    }
    if (static_cast<int>(cuts.size()) - 1 >= max_blocks_) return false;
    int mn = n + 1, mx = 0;
    for (int end = start + 1; end <= n; ++end) {
      mn = std::min(mn, sigma[end - 1]);
      mx = std::max(mx, sigma[end - 1]);
      if (mx - mn + 1 != end - start) continue;
      if (start == 0 && end == n) continue;
      cuts.push_back(end);
      const bool ok = search(sigma, cuts);
      cuts.pop_back();
      if (ok) return true;
    }
    return false;
  }

  bool accept(const Permutation& sigma, const std::vector<int>& cuts) {
    const int blocks = static_cast<int>(cuts.size()) - 1;
    std::vector<int> reps(blocks);
    for (int b = 0; b < blocks; ++b) reps[b] = sigma[cuts[b]];
    const Permutation rho = standardize(std::span<const int>(reps));
    bool pattern_ok = false;
    for (const auto& g : generators_) {
      if (g.size() >= rho.size() && contains_pattern(g, rho)) {
        pattern_ok = true;
        break;
      }
    }
    if (!pattern_ok) return false;
    for (int b = 0; b < blocks; ++b) {
      std::vector<int> vals(sigma.entries().begin() + cuts[b], sigma.entries().begin() + cuts[b + 1]);
      if (!member(standardize(std::span<const int>(vals)))) return false;
    }
    return true;
  }

  std::vector<Permutation> generators_;
  int max_blocks_ = 0;
  std::map<std::pair<int, std::uint64_t>, bool> memo_;
};

}  // namespace

bool class_membership(const Permutation& sigma, std::span<const Permutation> generators) {
  if (sigma.empty()) throw ValidationError("class_membership: empty permutation");
  if (sigma.size() > 20) throw CapExceeded("class_membership: |sigma| above 20");
  return ClassMembership(generators).member(sigma);
}

Permutation forbidden_pattern(int d) {
  if (d < 2) throw ValidationError("forbidden_pattern: d must be >= 2");
  std::vector<int> e;
  for (int v = 2 * d - 1; v >= 1; v -= 2) e.push_back(v);
  for (int v = 2 * d; v >= 2; v -= 2) e.push_back(v);
  return Permutation(std::move(e));
}

GapStats realization_gap_stats(const TreeRealizationHandle& h, int depth) {
  if (h.mode() != GapMode::UniformGaps) {
    throw ValidationError("realization_gap_stats: requires uniform gap mode");
  }
  const TruncatedRealization t = realize_truncation(h, depth);
  GapStats s{0.0, 1.0};
  for (double l : t.cell_lengths) {
    s.squared_sum += l * l;
    s.min_gap = std::min(s.min_gap, l);
  }
  return s;
}

}  // namespace permuton
