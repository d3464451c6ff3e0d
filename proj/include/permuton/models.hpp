#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "permuton/permutation.hpp"
#include "permuton/piecewise_affine.hpp"
#include "permuton/rng.hpp"
#include "permuton/tree.hpp"

namespace permuton {

struct LebesguePermuton {};

// Rescaled permutation matrix; cell i is a square of side weights[i].
class BlockPermuton {
 public:
  explicit BlockPermuton(Permutation pi, std::optional<std::vector<double>> weights = std::nullopt);

  const Permutation& pi() const { return pi_; }
  const std::vector<double>& weights() const { return weights_; }
  double x_offset(int i) const { return x_off_[i]; }
  double y_offset(int i) const { return y_off_[i]; }

 private:
  Permutation pi_;
  std::vector<double> weights_;
  std::vector<double> x_off_;
  std::vector<double> y_off_;
};

struct FunctionPermuton {
  PiecewiseAffineMap f;
};

// Piecewise-constant density on an m x m grid; cell (i, j) is the i-th column
// and j-th row, with mass density(i, j) / m^2.
class GridDensityPermuton {
 public:
  GridDensityPermuton(int m, std::vector<double> density_row_major);

  int resolution() const { return m_; }
  double density(int i, int j) const { return density_[static_cast<std::size_t>(i) * m_ + j]; }
  double cell_mass(int i, int j) const { return density(i, j) / (static_cast<double>(m_) * m_); }
  const std::vector<double>& densities() const { return density_; }

 private:
  int m_;
  std::vector<double> density_;
};

struct TreePermuton {
  TreeRealizationHandle handle;
  // Depth of the truncation used by rect_measure; sampling is exact.
  int truncation_depth = 10;
};

using PermutonModel =
    std::variant<LebesguePermuton, BlockPermuton, FunctionPermuton, GridDensityPermuton, TreePermuton>;

std::string model_kind(const PermutonModel& mu);

// Reusable sampler; keeps scratch buffers, so one instance per worker.
class PatternSampler {
 public:
  explicit PatternSampler(const PermutonModel& mu);

  // Samples n points and returns the pattern as 1-based values; the span is
  // valid until the next call.
  std::span<const int> draw(int n, Rng& rng);

 private:
  void draw_points(int n, Rng& rng);

  const PermutonModel& mu_;
  std::vector<double> cumulative_;  // block or grid cell selection
  std::vector<Point> points_;
  std::vector<double> ys_;
  std::vector<int> order_;
  std::vector<int> pattern_;
};

Permutation sample_pattern(const PermutonModel& mu, int n, Rng& rng);

struct MeasureValue {
  double value;
  double error_bound;  // 0 for exact models
};

MeasureValue rect_measure(const PermutonModel& mu, double x1, double x2, double y1, double y2);

// Cell masses on a g x g grid, index i * g + j (column i, row j).
std::vector<double> grid_masses(const PermutonModel& mu, int g);

// max over grid-aligned rectangles of |mu1(R) - mu2(R)|.
double box_distance(const PermutonModel& mu1, const PermutonModel& mu2, int g);
double box_distance_from_masses(std::span<const double> a, std::span<const double> b, int g);

// Block permuton of a tree truncation.
BlockPermuton block_from_truncation(const TruncatedRealization& t);

// Weak limit of oscillating approximators: uniform mass on each piece's
// domain x image rectangle, on an m x m grid aligned with the pieces.
GridDensityPermuton rectangle_union_limit(const PiecewiseAffineMap& f, int m);

}  // namespace permuton
