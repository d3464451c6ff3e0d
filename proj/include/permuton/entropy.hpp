#pragma once

#include <span>
#include <utility>
#include <vector>

#include "permuton/permutation.hpp"

namespace permuton {

// Shannon entropy in nats; zero and negative entries are skipped.
double shannon_entropy(std::span<const double> probs);
double shannon_entropy(const PatternDistribution& d);

struct MixtureBounds {
  double lower;    // sum_k w_k H(nu_k), weights normalized to sum 1
  double mixture;  // H(sum_k w_k nu_k)
  double upper;    // lower + H(w)
};

MixtureBounds mixture_entropy_bounds(
    std::span<const std::pair<double, PatternDistribution>> components);

// max over k >= 2 of |H_k - H_{k-1}| - log k; seq[0] is H_1.
// Returns -infinity for fewer than two entries.
double quasi_monotonicity_gap(std::span<const double> seq);

}  // namespace permuton
