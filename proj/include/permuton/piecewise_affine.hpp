#pragma once

#include <span>
#include <utility>
#include <vector>

namespace permuton {

// f(x) = slope * x + intercept on [lo, hi).
struct AffinePiece {
  double lo;
  double hi;
  double slope;
  double intercept;

  double at(double x) const { return slope * x + intercept; }
  double length() const { return hi - lo; }
  // Image as an ordered pair (low, high).
  std::pair<double, double> image() const;
};

// Piecewise affine self-map of [0,1). Measure preservation is not enforced on
// construction; see validate_measure_preserving.
class PiecewiseAffineMap {
 public:
  explicit PiecewiseAffineMap(std::vector<AffinePiece> pieces);

  static PiecewiseAffineMap identity();
  static PiecewiseAffineMap doubling();
  static PiecewiseAffineMap tent();
  // Pieces on consecutive domain intervals given by (x0, x1, y0, y1) endpoints.
  static PiecewiseAffineMap from_segments(std::span<const std::pair<std::pair<double, double>, std::pair<double, double>>> segments);

  const std::vector<AffinePiece>& pieces() const { return pieces_; }
  std::size_t piece_count() const { return pieces_.size(); }
  double operator()(double x) const;

  // lambda([x1,x2] ∩ f^{-1}([y1,y2])).
  double rect_measure(double x1, double x2, double y1, double y2) const;
  double preimage_length(double y1, double y2) const { return rect_measure(0.0, 1.0, y1, y2); }

 private:
  std::vector<AffinePiece> pieces_;
};

// max over grid intervals J = [i/g, j/g] of |lambda(f^{-1} J) - |J||.
double validate_measure_preserving(const PiecewiseAffineMap& f, int grid);

// Each piece replaced by 2k+1 equal-length pieces alternating between the
// piece's endpoint values.
PiecewiseAffineMap make_oscillating_approximator(const PiecewiseAffineMap& f, int k);

struct Interval {
  double lo;
  double hi;
};

// Continuous low-entropy modification: inside each range cell J, every affine
// preimage piece I_m keeps a core of its slope-one share of J and gains two
// steep flanks of total length alpha*|I_m|*(|J|-|I_m|)/|J| covering the rest.
PiecewiseAffineMap make_gap_filled(const PiecewiseAffineMap& f, std::span<const Interval> range_partition,
                                   double alpha);

// Uniform-range partition with `cells` equal intervals.
std::vector<Interval> uniform_partition(int cells);

}  // namespace permuton
