#include "permuton/exact.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "permuton/entropy.hpp"
#include "permuton/error.hpp"

namespace permuton {

namespace {

// Per-pattern mass accumulator; dense by Lehmer rank for small n.
class PatternAccumulator {
 public:
  explicit PatternAccumulator(int n) : n_(n) {
    if (n <= 10) dense_.assign(factorial_u64(n), 0.0);
  }

  void add(std::span<const int> pattern, double w) {
    const std::uint64_t r = lehmer_rank(pattern);
    if (!dense_.empty()) {
      dense_[r] += w;
    } else {
      sparse_[r] += w;
    }
  }

  PatternDistribution finish() const {
    if (!dense_.empty()) return PatternDistribution::from_dense(n_, dense_);
    std::map<std::uint64_t, double> m(sparse_.begin(), sparse_.end());
    return PatternDistribution(n_, std::move(m));
  }

 private:
  int n_;
  std::vector<double> dense_;
  std::unordered_map<std::uint64_t, double> sparse_;
};

double factorial_double(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Calls fn(k) for every composition of n into m non-negative parts.
template <typename Fn>
void for_each_composition(int n, int m, Fn&& fn) {
  std::vector<int> k(m, 0);
  auto rec = [&](auto&& self, int i, int left) -> void {
    if (i == m - 1) {
      k[i] = left;
      fn(k);
      return;
    }
    for (int c = 0; c <= left; ++c) {
      k[i] = c;
      self(self, i + 1, left - c);
    }
  };
  rec(rec, 0, n);
}

void check_n(int n, int cap, const char* what) {
  if (n < 1) throw ValidationError(std::string(what) + ": n must be >= 1");
  if (n > cap) throw CapExceeded(std::string(what) + ": n above cap " + std::to_string(cap));
}

}  // namespace

PatternDistribution exact_block_distribution(const BlockPermuton& b, int n) {
  check_n(n, kMaxBlockExactN, "exact_block_distribution");
  const Permutation& pi = b.pi();
  const int m = pi.size();
  if (m > kMaxBlockExactSize) {
    throw CapExceeded("exact_block_distribution: |pi| above cap " + std::to_string(kMaxBlockExactSize));
  }
  const auto& beta = b.weights();
  PatternAccumulator acc(n);
  std::vector<int> pattern(n);

  for_each_composition(n, m, [&](const std::vector<int>& k) {
    double w = factorial_double(n);
    std::vector<int> nonempty;
    for (int i = 0; i < m; ++i) {
      w *= std::pow(beta[i], k[i]) / factorial_double(k[i]);
      if (k[i] > 0) nonempty.push_back(i);
    }
    if (w == 0.0) return;
    // value offset of each nonempty block, ordered by pi
    std::vector<int> offset(m, 0);
    for (int i : nonempty) {
      for (int j : nonempty) {
        if (pi[j] < pi[i]) offset[i] += k[j];
      }
    }
    // each tau_i uniform on Sym(k_i): weight 1/k_i! per tuple
    double tuple_w = w;
    for (int i : nonempty) tuple_w /= factorial_double(k[i]);
    std::vector<std::vector<int>> tau;
    for (int i : nonempty) {
      std::vector<int> t(k[i]);
      std::iota(t.begin(), t.end(), 1);
      tau.push_back(std::move(t));
    }
    for (;;) {
      int pos = 0;
      for (std::size_t bi = 0; bi < nonempty.size(); ++bi) {
        for (int v : tau[bi]) pattern[pos++] = offset[nonempty[bi]] + v;
      }
      acc.add(pattern, tuple_w);
      std::size_t bi = tau.size();
      while (bi > 0) {
        --bi;
        if (std::next_permutation(tau[bi].begin(), tau[bi].end())) break;
        if (bi == 0) return;
      }
      if (tau.empty()) return;
    }
  });
  return acc.finish();
}

namespace {

struct SubPiece {
  double lo;
  double len;
  int group;
  bool increasing;
};

struct RangeDecomposition {
  std::vector<double> breaks;
  std::vector<SubPiece> pieces;                // domain order
  std::vector<std::vector<int>> group_members;  // indices into pieces
};

RangeDecomposition decompose(const PiecewiseAffineMap& f, std::optional<std::vector<double>> user_breaks) {
  constexpr double tol = 1e-12;
  std::vector<double> endpoints{0.0, 1.0};
  for (const auto& p : f.pieces()) {
    const auto [a, b] = p.image();
    endpoints.push_back(a);
    endpoints.push_back(b);
  }
  std::sort(endpoints.begin(), endpoints.end());
  std::vector<double> coarse;
  for (double e : endpoints) {
    if (coarse.empty() || e - coarse.back() > tol) coarse.push_back(e);
  }
  RangeDecomposition rd;
  if (user_breaks) {
    rd.breaks = *user_breaks;
    std::sort(rd.breaks.begin(), rd.breaks.end());
    for (double e : coarse) {
      const bool found = std::any_of(rd.breaks.begin(), rd.breaks.end(), [&](double b) { return std::abs(b - e) <= tol; });
      if (!found) throw ValidationError("exact_function_distribution: range partition misses an image endpoint");
    }
  } else {
    rd.breaks = coarse;
  }
  const int groups = static_cast<int>(rd.breaks.size()) - 1;
  rd.group_members.resize(groups);
  for (const auto& p : f.pieces()) {
    const auto [a, b] = p.image();
    for (int j = 0; j < groups; ++j) {
      const double c = rd.breaks[j];
      const double e = rd.breaks[j + 1];
      if (c < a - tol || e > b + tol) continue;
      const double xa = (c - p.intercept) / p.slope;
      const double xb = (e - p.intercept) / p.slope;
      rd.pieces.push_back({std::min(xa, xb), (e - c) / std::abs(p.slope), j, p.slope > 0});
    }
  }
  std::sort(rd.pieces.begin(), rd.pieces.end(), [](const SubPiece& u, const SubPiece& v) { return u.lo < v.lo; });
  for (int s = 0; s < static_cast<int>(rd.pieces.size()); ++s) rd.group_members[rd.pieces[s].group].push_back(s);
  return rd;
}

void check_measure_preserving(const PiecewiseAffineMap& f) {
  const double dev = validate_measure_preserving(f, 256);
  if (dev > 1e-9) {
    throw ValidationError("exact_function_distribution: map is not measure preserving (deviation " +
                          std::to_string(dev) + ")");
  }
}

// sum over group compositions of prod k_j^{n_j}: number of enumerated leaves.
double leaf_count(const RangeDecomposition& rd, int n) {
  std::vector<double> dp(n + 1, 0.0);
  dp[0] = 1.0;
  for (const auto& members : rd.group_members) {
    const double k = static_cast<double>(members.size());
    std::vector<double> next(n + 1, 0.0);
    for (int t = 0; t <= n; ++t) {
      double pw = 1.0;
      for (int a = 0; t + a <= n; ++a) {
        next[t + a] += dp[t] * pw;
        pw *= k;
      }
    }
    dp.swap(next);
  }
  return dp[n];
}

}  // namespace

PatternDistribution exact_function_distribution(const PiecewiseAffineMap& f, int n,
                                                std::optional<std::vector<double>> range_breaks) {
  check_n(n, kMaxDistributionLength, "exact_function_distribution");
  check_measure_preserving(f);
  const RangeDecomposition rd = decompose(f, std::move(range_breaks));
  const double work = leaf_count(rd, n) * n;
  if (work > kMaxExactWork) {
    throw CapExceeded("exact_function_distribution: work estimate " + std::to_string(work) + " above cap 1e8");
  }
  const int groups = static_cast<int>(rd.group_members.size());
  const int npieces = static_cast<int>(rd.pieces.size());
  PatternAccumulator acc(n);
  // seq[t] = sub-piece of the t-th lowest point; groups nondecreasing in t
  std::vector<int> seq(n);
  std::vector<int> group_count(groups, 0);
  std::vector<std::vector<int>> slots(npieces);
  std::vector<int> pattern(n);
  const double nf = factorial_double(n);

  auto leaf = [&](double w) {
    double multinom = nf;
    for (int c : group_count) multinom /= factorial_double(c);
    for (auto& s : slots) s.clear();
    for (int t = 0; t < n; ++t) slots[seq[t]].push_back(t + 1);
    int pos = 0;
    for (int s = 0; s < npieces; ++s) {
      if (rd.pieces[s].increasing) {
        for (int v : slots[s]) pattern[pos++] = v;
      } else {
        for (auto it = slots[s].rbegin(); it != slots[s].rend(); ++it) pattern[pos++] = *it;
      }
    }
    acc.add(pattern, multinom * w);
  };
  auto rec = [&](auto&& self, int t, int g0, double w) -> void {
    if (t == n) {
      leaf(w);
      return;
    }
    for (int g = g0; g < groups; ++g) {
      ++group_count[g];
      for (int s : rd.group_members[g]) {
        seq[t] = s;
        self(self, t + 1, g, w * rd.pieces[s].len);
      }
      --group_count[g];
    }
  };
  rec(rec, 0, 0, 1.0);
  return acc.finish();
}

PatternDistribution exact_grid_distribution(const GridDensityPermuton& g, int n) {
  check_n(n, 6, "exact_grid_distribution");
  const int m = g.resolution();
  const double cells = static_cast<double>(m) * m;
  if (std::pow(cells, n) * factorial_double(n) > kMaxExactWork) {
    throw CapExceeded("exact_grid_distribution: (m^2)^n * n! above cap 1e8");
  }
  std::vector<std::vector<int>> perms;
  {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    do {
      perms.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
  }
  PatternAccumulator acc(n);
  std::vector<int> cell(n, 0);
  std::vector<int> pattern(n);
  std::vector<int> yrank(n);
  const auto total = static_cast<std::uint64_t>(std::llround(std::pow(cells, n)));
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t c = code;
    double w = 1.0;
    for (int p = 0; p < n; ++p) {
      cell[p] = static_cast<int>(c % static_cast<std::uint64_t>(cells));
      c /= static_cast<std::uint64_t>(cells);
      w *= g.cell_mass(cell[p] / m, cell[p] % m);
    }
    if (w == 0.0) continue;
    // orders of labelled points consistent with column (x) and row (y) keys
    std::vector<const std::vector<int>*> xs, ys;
    for (const auto& p : perms) {
      bool xok = true, yok = true;
      for (int i = 1; i < n; ++i) {
        xok = xok && cell[p[i - 1]] / m <= cell[p[i]] / m;
        yok = yok && cell[p[i - 1]] % m <= cell[p[i]] % m;
      }
      if (xok) xs.push_back(&p);
      if (yok) ys.push_back(&p);
    }
    const double share = w / (static_cast<double>(xs.size()) * static_cast<double>(ys.size()));
    for (const auto* yo : ys) {
      for (int r = 0; r < n; ++r) yrank[(*yo)[r]] = r + 1;
      for (const auto* xo : xs) {
        for (int i = 0; i < n; ++i) pattern[i] = yrank[(*xo)[i]];
        acc.add(pattern, share);
      }
    }
  }
  return acc.finish();
}

PatternDistribution exact_distribution(const PermutonModel& mu, int n) {
  if (std::holds_alternative<LebesguePermuton>(mu)) {
    return exact_block_distribution(BlockPermuton(Permutation::identity(1)), n);
  }
  if (const auto* b = std::get_if<BlockPermuton>(&mu)) return exact_block_distribution(*b, n);
  if (const auto* f = std::get_if<FunctionPermuton>(&mu)) return exact_function_distribution(f->f, n);
  if (const auto* g = std::get_if<GridDensityPermuton>(&mu)) return exact_grid_distribution(*g, n);
  throw ValidationError("exact_distribution: tree models have no exact pattern distribution");
}

boost::multiprecision::cpp_int interleaving_count(std::span<const int> block_sizes) {
  using boost::multiprecision::cpp_int;
  std::uint64_t fast = 1;
  bool overflow = false;
  int total = 0;
  for (int s : block_sizes) {
    if (s < 0) throw ValidationError("interleaving_count: negative block size");
    // multiply by C(total + s, s) incrementally: each step stays integral
    for (int i = 1; i <= s && !overflow; ++i) {
      std::uint64_t num = 0;
      overflow = __builtin_mul_overflow(fast, static_cast<std::uint64_t>(total + i), &num);
      fast = num / static_cast<std::uint64_t>(i);
      // exact because fast * (total+i) is divisible by i at this point
    }
    total += s;
  }
  if (!overflow) return cpp_int(fast);
  cpp_int big = 1;
  total = 0;
  for (int s : block_sizes) {
    for (int i = 1; i <= s; ++i) big = big * (total + i) / i;
    total += s;
  }
  return big;
}

GeomSepEntropy geom_sep_entropy(std::span<const double> weights,
                                const std::vector<std::vector<double>>& component_h, int n) {
  if (n < 0) throw ValidationError("geom_sep_entropy: n must be >= 0");
  if (component_h.size() != weights.size()) throw ValidationError("geom_sep_entropy: one entropy array per weight");
  double value = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (static_cast<int>(component_h[i].size()) < n + 1) {
      throw ValidationError("geom_sep_entropy: component entropy array shorter than n+1");
    }
    const double b = weights[i];
    double binom = 1.0;
    for (int k = 1; k <= n; ++k) {
      binom = binom * (n - k + 1) / k;
      value += binom * std::pow(b, k) * std::pow(1.0 - b, n - k) * component_h[i][k];
    }
  }
  const auto m = static_cast<double>(weights.size());
  return {value, m * std::log(n + m)};
}

double integral_log_abs_derivative(const PiecewiseAffineMap& f) {
  double s = 0.0;
  for (const auto& p : f.pieces()) s += p.length() * std::log(std::abs(p.slope));
  return s;
}

double integral_log_abs_derivative(const std::function<double(double)>& derivative,
                                   std::span<const double> breakpoints, double tolerance) {
  if (breakpoints.size() < 2) throw ValidationError("integral_log_abs_derivative: need at least two breakpoints");
  boost::math::quadrature::tanh_sinh<double> integrator;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i];
    const double b = breakpoints[i + 1];
    if (!(b > a)) throw ValidationError("integral_log_abs_derivative: breakpoints must increase");
    auto integrand = [&](double x) {
      const double d = std::abs(derivative(x));
      if (d == 0.0) throw ValidationError("integral_log_abs_derivative: zero derivative on a positive-length set");
      return std::log(d);
    };
    double err = 0.0;
    total += integrator.integrate(integrand, a, b, tolerance, &err);
    if (err > 100 * tolerance * std::max(1.0, std::abs(total))) {
      throw NumericalError("integral_log_abs_derivative: quadrature did not reach tolerance");
    }
  }
  return total;
}

EntropySandwich function_entropy_sandwich(const PiecewiseAffineMap& f, int n) {
  const PatternDistribution exact = exact_function_distribution(f, n);
  const RangeDecomposition rd = decompose(f, std::nullopt);
  const int K = static_cast<int>(rd.pieces.size());
  double comps = 1.0;
  for (int i = 1; i < K; ++i) comps = comps * (n + i) / i;
  if (comps > kMaxExactWork) throw CapExceeded("function_entropy_sandwich: allocation count above cap 1e8");
  const double nf = factorial_double(n);
  double lower = 0.0;
  double h_alloc = 0.0;
  for_each_composition(n, K, [&](const std::vector<int>& mvec) {
    double p = nf;
    for (int s = 0; s < K; ++s) p *= std::pow(rd.pieces[s].len, mvec[s]) / factorial_double(mvec[s]);
    if (p <= 0.0) return;
    double log_m = 0.0;
    for (const auto& members : rd.group_members) {
      int tot = 0;
      for (int s : members) {
        tot += mvec[s];
        log_m -= std::lgamma(mvec[s] + 1.0);
      }
      log_m += std::lgamma(tot + 1.0);
    }
    lower += p * log_m;
    h_alloc -= p * std::log(p);
  });
  return {lower, shannon_entropy(exact), lower + h_alloc};
}

}  // namespace permuton
