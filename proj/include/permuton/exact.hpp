#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "permuton/models.hpp"
#include "permuton/permutation.hpp"
#include "permuton/piecewise_affine.hpp"

namespace permuton {

constexpr int kMaxBlockExactN = 9;
constexpr int kMaxBlockExactSize = 8;
// Upper bound on enumerated (allocation, interleaving) leaves.
constexpr double kMaxExactWork = 1e8;

PatternDistribution exact_block_distribution(const BlockPermuton& b, int n);

// Range breakpoints must contain every piece's image endpoints; when absent
// the coarsest such partition is used.
PatternDistribution exact_function_distribution(const PiecewiseAffineMap& f, int n,
                                                std::optional<std::vector<double>> range_breaks = std::nullopt);

PatternDistribution exact_grid_distribution(const GridDensityPermuton& g, int n);

// Dispatches on the model kind; tree models have no exact path.
PatternDistribution exact_distribution(const PermutonModel& mu, int n);

// Multinomial (sum sizes)! / prod sizes!.
boost::multiprecision::cpp_int interleaving_count(std::span<const int> block_sizes);

struct GeomSepEntropy {
  double value;        // sum_i sum_k C(n,k) b_i^k (1-b_i)^(n-k) H_i(k)
  double omega_upper;  // m log(n + m)
};

// component_h[i][k] = H(mu_i^(k)) for k = 0..n.
GeomSepEntropy geom_sep_entropy(std::span<const double> weights,
                                const std::vector<std::vector<double>>& component_h, int n);

// Closed form sum |I| log |slope|.
double integral_log_abs_derivative(const PiecewiseAffineMap& f);
// Adaptive Gauss-Kronrod on each [breakpoints[i], breakpoints[i+1]].
double integral_log_abs_derivative(const std::function<double(double)>& derivative,
                                   std::span<const double> breakpoints, double tolerance = 1e-8);

struct EntropySandwich {
  double lower;  // sum_m P(m) log M(m)
  double exact;  // H_n
  double upper;  // lower + H(allocation)
};

EntropySandwich function_entropy_sandwich(const PiecewiseAffineMap& f, int n);

}  // namespace permuton
