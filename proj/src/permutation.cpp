#include "permuton/permutation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "permuton/error.hpp"
#include "permuton/kahan.hpp"

namespace permuton {

Permutation::Permutation(std::vector<int> entries) : entries_(std::move(entries)) {
  const int n = size();
  if (n == 0) throw ValidationError("permutation must have at least one entry");
  std::vector<char> seen(n + 1, 0);
  for (int v : entries_) {
    if (v < 1 || v > n || seen[v]) {
      throw ValidationError("not a permutation of 1.." + std::to_string(n));
    }
    seen[v] = 1;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<int> e(n);
  std::iota(e.begin(), e.end(), 1);
  return Permutation(std::move(e));
}

Permutation Permutation::parse(std::string_view text) {
  std::vector<int> e;
  if (text.find(',') != std::string_view::npos) {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t next = text.find(',', pos);
      if (next == std::string_view::npos) next = text.size();
      std::string_view tok = text.substr(pos, next - pos);
      while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
      while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
      if (tok.empty()) throw ValidationError("empty entry in permutation '" + std::string(text) + "'");
      int v = 0;
      for (char c : tok) {
        if (c < '0' || c > '9') throw ValidationError("bad permutation '" + std::string(text) + "'");
        v = v * 10 + (c - '0');
        if (v > 1000000) throw ValidationError("permutation entry too large");
      }
      e.push_back(v);
      pos = next + 1;
    }
  } else {
    for (char c : text) {
      if (c < '1' || c > '9') throw ValidationError("bad permutation '" + std::string(text) + "'");
      e.push_back(c - '0');
    }
  }
  return Permutation(std::move(e));
}

std::uint64_t factorial_u64(int n) {
  if (n < 0 || n > 20) throw CapExceeded("factorial_u64: n must be in [0, 20]");
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

std::uint64_t lehmer_rank(std::span<const int> values) {
  const int n = static_cast<int>(values.size());
  std::uint64_t r = 0;
  for (int i = 0; i < n; ++i) {
    int smaller = 0;
    for (int j = i + 1; j < n; ++j) smaller += values[j] < values[i];
    r = r * static_cast<std::uint64_t>(n - i) + static_cast<std::uint64_t>(smaller);
  }
  return r;
}

std::uint64_t Permutation::rank() const {
  if (size() > 20) throw CapExceeded("rank: length above 20");
  return lehmer_rank(entries_);
}

Permutation Permutation::from_rank(int n, std::uint64_t rank) {
  if (n < 1 || n > 20) throw CapExceeded("from_rank: n must be in [1, 20]");
  if (rank >= factorial_u64(n)) throw ValidationError("from_rank: rank out of range");
  std::vector<int> digits(n);
  for (int i = n - 1; i >= 0; --i) {
    const auto base = static_cast<std::uint64_t>(n - i);
    digits[i] = static_cast<int>(rank % base);
    rank /= base;
  }
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 1);
  std::vector<int> e(n);
  for (int i = 0; i < n; ++i) {
    e[i] = pool[digits[i]];
    pool.erase(pool.begin() + digits[i]);
  }
  return Permutation(std::move(e));
}

Permutation Permutation::reversed() const {
  std::vector<int> e(entries_.rbegin(), entries_.rend());
  return Permutation(std::move(e));
}

Permutation Permutation::complemented() const {
  std::vector<int> e(entries_);
  for (int& v : e) v = size() + 1 - v;
  return Permutation(std::move(e));
}

Permutation Permutation::inverse() const {
  std::vector<int> e(entries_.size());
  for (int i = 0; i < size(); ++i) e[entries_[i] - 1] = i + 1;
  return Permutation(std::move(e));
}

std::string Permutation::to_string() const {
  std::string s;
  const bool commas = size() > 9;
  for (int i = 0; i < size(); ++i) {
    if (commas && i > 0) s += ',';
    s += std::to_string(entries_[i]);
  }
  return s;
}

namespace {
template <typename T>
Permutation standardize_impl(std::span<const T> values) {
  const int n = static_cast<int>(values.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return values[a] < values[b]; });
  std::vector<int> e(n);
  for (int r = 0; r < n; ++r) {
    if (r > 0 && !(values[order[r - 1]] < values[order[r]])) {
      throw CollisionError("standardize: repeated value");
    }
    e[order[r]] = r + 1;
  }
  return Permutation(std::move(e));
}
}  // namespace

Permutation standardize(std::span<const double> values) { return standardize_impl(values); }
Permutation standardize(std::span<const int> values) { return standardize_impl(values); }

Permutation pattern_of_points(std::span<const Point> points) {
  const int n = static_cast<int>(points.size());
  if (n == 0) throw ValidationError("pattern_of_points: empty point set");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return points[a].x < points[b].x; });
  std::vector<double> ys(n);
  for (int i = 0; i < n; ++i) {
    if (i > 0 && !(points[order[i - 1]].x < points[order[i]].x)) {
      throw CollisionError("pattern_of_points: duplicate x coordinate");
    }
    ys[i] = points[order[i]].y;
  }
  return standardize(std::span<const double>(ys));
}

Permutation substitute(const Permutation& sigma, std::span<const Permutation> blocks) {
  const int m = sigma.size();
  if (static_cast<int>(blocks.size()) != m) {
    throw ValidationError("substitute: expected " + std::to_string(m) + " blocks");
  }
  // offset[v] = total size of blocks whose sigma value is below v
  std::vector<int> size_by_value(m + 1, 0);
  for (int i = 0; i < m; ++i) {
    if (blocks[i].empty()) throw ValidationError("substitute: empty block");
    size_by_value[sigma[i]] = blocks[i].size();
  }
  std::vector<int> offset(m + 1, 0);
  for (int v = 2; v <= m; ++v) offset[v] = offset[v - 1] + size_by_value[v - 1];
  std::vector<int> e;
  for (int i = 0; i < m; ++i) {
    for (int v : blocks[i].entries()) e.push_back(offset[sigma[i]] + v);
  }
  return Permutation(std::move(e));
}

Permutation restrict(const Permutation& pi, std::span<const int> indices) {
  if (indices.empty()) throw ValidationError("restrict: empty index set");
  std::vector<int> vals;
  vals.reserve(indices.size());
  int prev = 0;
  for (int idx : indices) {
    if (idx < 1 || idx > pi.size()) throw ValidationError("restrict: index out of range");
    if (idx <= prev) throw ValidationError("restrict: indices must be strictly increasing");
    prev = idx;
    vals.push_back(pi[idx - 1]);
  }
  return standardize(std::span<const int>(vals));
}

namespace {

// Depth-first search over increasing position tuples; each new entry must sit
// in the same relative order to the chosen ones as in sigma.
class OccurrenceSearch {
 public:
  OccurrenceSearch(const Permutation& pi, const Permutation& sigma, bool stop_at_first)
      : pi_(pi), sigma_(sigma), stop_(stop_at_first), chosen_(sigma.size()) {}

  std::uint64_t run() {
    if (sigma_.size() > pi_.size()) return 0;
    recurse(0, 0);
    return count_;
  }

 private:
  void recurse(int depth, int start) {
    const int k = sigma_.size();
    if (depth == k) {
      ++count_;
      return;
    }
    const int n = pi_.size();
    for (int p = start; p <= n - (k - depth); ++p) {
      const int v = pi_[p];
      bool ok = true;
      for (int j = 0; j < depth && ok; ++j) {
        ok = (pi_[chosen_[j]] < v) == (sigma_[j] < sigma_[depth]);
      }
      if (!ok) continue;
      chosen_[depth] = p;
      recurse(depth + 1, p + 1);
      if (stop_ && count_ > 0) return;
    }
  }

  const Permutation& pi_;
  const Permutation& sigma_;
  bool stop_;
  std::vector<int> chosen_;
  std::uint64_t count_ = 0;
};

}  // namespace

bool contains_pattern(const Permutation& pi, const Permutation& sigma) {
  return OccurrenceSearch(pi, sigma, true).run() > 0;
}

std::uint64_t count_occurrences(const Permutation& pi, const Permutation& sigma) {
  if (pi.size() > 16) throw CapExceeded("count_occurrences: |pi| above 16");
  return OccurrenceSearch(pi, sigma, false).run();
}

double pattern_density(const Permutation& pi, const Permutation& sigma) {
  if (sigma.size() > pi.size()) return 0.0;
  const int n = pi.size();
  const int k = sigma.size();
  double binom = 1.0;
  for (int i = 1; i <= k; ++i) binom = binom * (n - k + i) / i;
  return static_cast<double>(count_occurrences(pi, sigma)) / binom;
}

PatternDistribution::PatternDistribution(int n, std::map<std::uint64_t, double> probs)
    : n_(n), probs_(std::move(probs)) {
  if (n < 1 || n > kMaxDistributionLength) {
    throw CapExceeded("PatternDistribution: n must be in [1, 12]");
  }
  const std::uint64_t nf = factorial_u64(n);
  KahanSum sum;
  const double tol = 1e-12 + 4.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(probs_.size());
  for (auto it = probs_.begin(); it != probs_.end();) {
    if (it->first >= nf) throw ValidationError("PatternDistribution: key outside Sym(n)");
    if (!(it->second >= -1e-15 && it->second <= 1.0 + 1e-12)) {
      throw ValidationError("PatternDistribution: probability outside [0,1]");
    }
    sum.add(it->second);
    if (it->second <= 0.0) {
      it = probs_.erase(it);
    } else {
      ++it;
    }
  }
  if (std::abs(sum.value() - 1.0) > tol) {
    throw ValidationError("PatternDistribution: probabilities sum to " + std::to_string(sum.value()));
  }
}

PatternDistribution PatternDistribution::from_dense(int n, std::span<const double> by_rank) {
  if (n < 1 || n > kMaxDistributionLength) throw CapExceeded("from_dense: n must be in [1, 12]");
  if (by_rank.size() != factorial_u64(n)) throw ValidationError("from_dense: expected n! entries");
  std::map<std::uint64_t, double> m;
  for (std::size_t r = 0; r < by_rank.size(); ++r) {
    if (by_rank[r] != 0.0) m.emplace_hint(m.end(), r, by_rank[r]);
  }
  return PatternDistribution(n, std::move(m));
}

PatternDistribution PatternDistribution::point_mass(const Permutation& pi) {
  return PatternDistribution(pi.size(), {{pi.rank(), 1.0}});
}

PatternDistribution PatternDistribution::uniform(int n) {
  const std::uint64_t nf = factorial_u64(n);
  std::vector<double> p(nf, 1.0 / static_cast<double>(nf));
  return from_dense(n, p);
}

double PatternDistribution::probability(const Permutation& pi) const {
  if (pi.size() != n_) return 0.0;
  return probability_of_rank(pi.rank());
}

double PatternDistribution::probability_of_rank(std::uint64_t rank) const {
  auto it = probs_.find(rank);
  return it == probs_.end() ? 0.0 : it->second;
}

std::vector<std::pair<Permutation, double>> PatternDistribution::entries() const {
  std::vector<std::pair<Permutation, double>> out;
  out.reserve(probs_.size());
  for (const auto& [r, p] : probs_) out.emplace_back(Permutation::from_rank(n_, r), p);
  return out;
}

double PatternDistribution::total() const {
  double s = 0.0;
  for (const auto& kv : probs_) s += kv.second;
  return s;
}

}  // namespace permuton
