#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "permuton/permutation.hpp"
#include "permuton/rng.hpp"

namespace permuton {

enum class GapMode { Equal, UniformGaps };

std::string to_string(GapMode mode);
GapMode gap_mode_from_string(const std::string& s);

constexpr int kMaxArity = 12;

// Distribution F on Sym(d).
class PermutationLaw {
 public:
  PermutationLaw(int d, std::vector<std::pair<Permutation, double>> weights);
  static PermutationLaw uniform(int d);
  static PermutationLaw dirac(const Permutation& pi);

  int d() const { return d_; }
  const std::vector<Permutation>& support() const { return support_; }
  const std::vector<double>& probabilities() const { return probs_; }
  // Index into support() for u in (0,1).
  int draw_index(double u) const;
  // inverse_of(i)[v-1] = position holding value v in support()[i].
  const std::array<int, kMaxArity>& inverse_of(int i) const { return inverses_[i]; }

 private:
  int d_;
  std::vector<Permutation> support_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
  std::vector<std::array<int, kMaxArity>> inverses_;
};

// A random tree permuton realization. Node randomness is a pure function of
// (seed, path), so nothing is stored and depth is unbounded.
class TreeRealizationHandle {
 public:
  TreeRealizationHandle(std::uint64_t seed, PermutationLaw law, GapMode mode);

  std::uint64_t seed() const { return seed_; }
  const PermutationLaw& law() const { return law_; }
  GapMode mode() const { return mode_; }
  int d() const { return law_.d(); }

  std::uint64_t root_key() const { return root_; }
  static std::uint64_t child_key(std::uint64_t key, int digit);
  std::uint64_t key_of_path(std::span<const int> path) const;

  int label_index(std::uint64_t key) const;
  const Permutation& label(std::uint64_t key) const;
  // Writes d edge weights summing to 1.
  void gaps(std::uint64_t key, double* out) const;

 private:
  std::uint64_t seed_;
  PermutationLaw law_;
  GapMode mode_;
  std::uint64_t root_;
};

struct TruncatedRealization {
  int depth = 0;
  Permutation pi;                    // length d^depth
  std::vector<double> cell_lengths;  // T(s) in x-order
};

constexpr std::size_t kMaxTruncationCells = std::size_t{1} << 20;

TruncatedRealization realize_truncation(const TreeRealizationHandle& h, int depth);

// Exact sample of the realization's n-point pattern, written as 1-based
// values into out[0..n). Reuses no state between calls.
void sample_tree_pattern_into(const TreeRealizationHandle& h, int n, Rng& rng, int* out);
Permutation sample_pattern_lazy(const TreeRealizationHandle& h, int n, Rng& rng);

// Probability that child 0 receives k of n points, k = 0..n.
std::vector<double> allocation_marginal(int d, int n, GapMode mode);
// Probability of the full child-count vector.
double allocation_probability(std::span<const int> counts, GapMode mode);

using Rational = boost::multiprecision::cpp_rational;

// E over realizations of t(sigma, mu), |sigma| <= 6.
double expected_pattern_density(const PermutationLaw& law, const Permutation& sigma,
                                GapMode mode);
// Same with exact rational arithmetic; law weights are converted exactly.
Rational expected_pattern_density_exact(const PermutationLaw& law, const Permutation& sigma,
                                        GapMode mode);

bool class_membership(const Permutation& sigma, std::span<const Permutation> generators);

// (2d-1, 2d-3, ..., 1, 2d, 2d-2, ..., 2)
Permutation forbidden_pattern(int d);

struct GapStats {
  double squared_sum;  // L_m
  double min_gap;
};

GapStats realization_gap_stats(const TreeRealizationHandle& h, int depth);

}  // namespace permuton
