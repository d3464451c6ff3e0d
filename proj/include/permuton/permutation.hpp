#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace permuton {

// Finite permutation in one-line notation with 1-based values.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<int> entries);

  static Permutation identity(int n);
  // Accepts "3142" for n <= 9 and comma-separated values for any n.
  static Permutation parse(std::string_view text);
  // Inverse of rank(); n <= 20.
  static Permutation from_rank(int n, std::uint64_t rank);

  int size() const { return static_cast<int>(entries_.size()); }
  bool empty() const { return entries_.empty(); }
  int operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<int>& entries() const { return entries_; }

  // Lehmer-code rank in [0, n!); n <= 20.
  std::uint64_t rank() const;

  Permutation reversed() const;
  Permutation complemented() const;
  Permutation inverse() const;

  std::string to_string() const;

  auto operator<=>(const Permutation&) const = default;
  bool operator==(const Permutation&) const = default;

 private:
  std::vector<int> entries_;
};

struct Point {
  double x;
  double y;
};

// Lehmer rank of a pattern stored as 1-based values; no validation.
std::uint64_t lehmer_rank(std::span<const int> values);

std::uint64_t factorial_u64(int n);

// Order-isomorphic standardization of distinct values.
Permutation standardize(std::span<const double> values);
Permutation standardize(std::span<const int> values);

Permutation pattern_of_points(std::span<const Point> points);

// Inflation sigma[blocks...].
Permutation substitute(const Permutation& sigma, std::span<const Permutation> blocks);

// Pattern of the entries at the given 1-based, strictly increasing positions.
Permutation restrict(const Permutation& pi, std::span<const int> indices);

bool contains_pattern(const Permutation& pi, const Permutation& sigma);
std::uint64_t count_occurrences(const Permutation& pi, const Permutation& sigma);
// t(sigma, pi) = count / C(|pi|, |sigma|).
double pattern_density(const Permutation& pi, const Permutation& sigma);

// Probability vector over Sym(n) keyed by Lehmer rank; zero entries absent.
class PatternDistribution {
 public:
  PatternDistribution(int n, std::map<std::uint64_t, double> probs);
  // by_rank has n! entries.
  static PatternDistribution from_dense(int n, std::span<const double> by_rank);
  static PatternDistribution point_mass(const Permutation& pi);
  static PatternDistribution uniform(int n);

  int n() const { return n_; }
  double probability(const Permutation& pi) const;
  double probability_of_rank(std::uint64_t rank) const;
  const std::map<std::uint64_t, double>& by_rank() const { return probs_; }
  std::vector<std::pair<Permutation, double>> entries() const;
  std::size_t support_size() const { return probs_.size(); }
  double total() const;

 private:
  int n_;
  std::map<std::uint64_t, double> probs_;
};

constexpr int kMaxDistributionLength = 12;

}  // namespace permuton
