#include "permuton/piecewise_affine.hpp"

#include <algorithm>
#include <cmath>

#include "permuton/error.hpp"

namespace permuton {

namespace {
constexpr double kEndpointTol = 1e-12;

double overlap(double a1, double a2, double b1, double b2) {
  return std::max(0.0, std::min(a2, b2) - std::max(a1, b1));
}
}  // namespace

std::pair<double, double> AffinePiece::image() const {
  const double a = at(lo);
  const double b = at(hi);
  return a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
}

PiecewiseAffineMap::PiecewiseAffineMap(std::vector<AffinePiece> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw ValidationError("piecewise affine map: no pieces");
  if (std::abs(pieces_.front().lo) > kEndpointTol || std::abs(pieces_.back().hi - 1.0) > kEndpointTol) {
    throw ValidationError("piecewise affine map: domains must cover [0,1)");
  }
  pieces_.front().lo = 0.0;
  pieces_.back().hi = 1.0;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    AffinePiece& p = pieces_[i];
    if (i > 0) {
      if (std::abs(p.lo - pieces_[i - 1].hi) > kEndpointTol) {
        throw ValidationError("piecewise affine map: gap or overlap between pieces " + std::to_string(i - 1) +
                              " and " + std::to_string(i));
      }
      p.lo = pieces_[i - 1].hi;
    }
    if (!(p.hi > p.lo)) throw ValidationError("piecewise affine map: empty piece domain");
    if (!(std::isfinite(p.slope) && std::isfinite(p.intercept)) || p.slope == 0.0) {
      throw ValidationError("piecewise affine map: slope must be finite and nonzero");
    }
    const auto [a, b] = p.image();
    if (a < -1e-9 || b > 1.0 + 1e-9) throw ValidationError("piecewise affine map: image leaves [0,1]");
  }
}

PiecewiseAffineMap PiecewiseAffineMap::identity() { return PiecewiseAffineMap({{0.0, 1.0, 1.0, 0.0}}); }

PiecewiseAffineMap PiecewiseAffineMap::doubling() {
  return PiecewiseAffineMap({{0.0, 0.5, 2.0, 0.0}, {0.5, 1.0, 2.0, -1.0}});
}

PiecewiseAffineMap PiecewiseAffineMap::tent() {
  return PiecewiseAffineMap({{0.0, 0.5, 2.0, 0.0}, {0.5, 1.0, -2.0, 2.0}});
}

PiecewiseAffineMap PiecewiseAffineMap::from_segments(
    std::span<const std::pair<std::pair<double, double>, std::pair<double, double>>> segments) {
  std::vector<AffinePiece> pieces;
  for (const auto& [xs, ys] : segments) {
    const double slope = (ys.second - ys.first) / (xs.second - xs.first);
    pieces.push_back({xs.first, xs.second, slope, ys.first - slope * xs.first});
  }
  return PiecewiseAffineMap(std::move(pieces));
}

double PiecewiseAffineMap::operator()(double x) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                             [](double v, const AffinePiece& p) { return v < p.hi; });
  if (it == pieces_.end()) --it;
  return it->at(x);
}

double PiecewiseAffineMap::rect_measure(double x1, double x2, double y1, double y2) const {
  double total = 0.0;
  for (const auto& p : pieces_) {
    const double a = std::max(x1, p.lo);
    const double b = std::min(x2, p.hi);
    if (!(b > a)) continue;
    const double fa = p.at(a);
    const double fb = p.at(b);
    total += overlap(std::min(fa, fb), std::max(fa, fb), y1, y2) / std::abs(p.slope);
  }
  return total;
}

double validate_measure_preserving(const PiecewiseAffineMap& f, int grid) {
  if (grid < 1) throw ValidationError("validate_measure_preserving: grid must be >= 1");
  double lo = 0.0;
  double hi = 0.0;
  for (int j = 1; j <= grid; ++j) {
    const double y = static_cast<double>(j) / grid;
    const double e = f.preimage_length(0.0, y) - y;
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  return hi - lo;
}

PiecewiseAffineMap make_oscillating_approximator(const PiecewiseAffineMap& f, int k) {
  if (k < 1) throw ValidationError("make_oscillating_approximator: k must be >= 1");
  std::vector<AffinePiece> out;
  const int parts = 2 * k + 1;
  for (const auto& p : f.pieces()) {
    const double len = p.length() / parts;
    const double ya = p.at(p.lo);
    const double yb = p.at(p.hi);
    for (int t = 0; t < parts; ++t) {
      const double x0 = t == 0 ? p.lo : p.lo + t * len;
      const double x1 = t == parts - 1 ? p.hi : p.lo + (t + 1) * len;
      const double y0 = t % 2 == 0 ? ya : yb;
      const double y1 = t % 2 == 0 ? yb : ya;
      const double slope = (y1 - y0) / (x1 - x0);
      out.push_back({x0, x1, slope, y0 - slope * x0});
    }
  }
  return PiecewiseAffineMap(std::move(out));
}

std::vector<Interval> uniform_partition(int cells) {
  if (cells < 1) throw ValidationError("uniform_partition: need at least one cell");
  std::vector<Interval> out;
  for (int i = 0; i < cells; ++i) {
    out.push_back({static_cast<double>(i) / cells, static_cast<double>(i + 1) / cells});
  }
  return out;
}

PiecewiseAffineMap make_gap_filled(const PiecewiseAffineMap& f, std::span<const Interval> range_partition,
                                   double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("make_gap_filled: alpha must be in (0,1)");
  if (range_partition.empty()) throw ValidationError("make_gap_filled: empty range partition");
  constexpr double tol = 1e-9;
  if (std::abs(range_partition.front().lo) > tol || std::abs(range_partition.back().hi - 1.0) > tol) {
    throw ValidationError("make_gap_filled: range partition must cover [0,1]");
  }
  for (std::size_t j = 0; j < range_partition.size(); ++j) {
    if (!(range_partition[j].hi > range_partition[j].lo) ||
        (j > 0 && std::abs(range_partition[j].lo - range_partition[j - 1].hi) > tol)) {
      throw ValidationError("make_gap_filled: range partition intervals must be contiguous and non-empty");
    }
  }

  struct Segment {
    double x0, x1, y0, y1;
  };
  std::vector<Segment> segs;

  for (const auto& J : range_partition) {
    const double jlen = J.hi - J.lo;
    // Affine preimage pieces of J in domain order.
    struct Pre {
      double a, b;
      bool increasing;
    };
    std::vector<Pre> pre;
    for (const auto& p : f.pieces()) {
      const auto [ilo, ihi] = p.image();
      const double ov = overlap(ilo, ihi, J.lo, J.hi);
      if (ov <= tol) continue;
      if (std::abs(ov - jlen) > tol) {
        throw ValidationError("make_gap_filled: range partition incompatible with f (a piece covers only part of a cell)");
      }
      const double xa = (J.lo - p.intercept) / p.slope;
      const double xb = (J.hi - p.intercept) / p.slope;
      pre.push_back({std::min(xa, xb), std::max(xa, xb), p.slope > 0});
    }
    std::sort(pre.begin(), pre.end(), [](const Pre& u, const Pre& v) { return u.a < v.a; });
    double stacked = J.lo;
    for (const auto& I : pre) {
      const double len = I.b - I.a;
      const double core_lo = stacked;
      const double core_hi = std::min(J.hi, stacked + len);
      stacked = core_hi;
      const double below = core_lo - J.lo;
      const double above = J.hi - core_hi;
      // Range pieces in the order they are traversed along the domain.
      std::pair<double, double> ranges[3];
      if (I.increasing) {
        ranges[0] = {J.lo, core_lo};
        ranges[1] = {core_lo, core_hi};
        ranges[2] = {core_hi, J.hi};
      } else {
        ranges[0] = {J.hi, core_hi};
        ranges[1] = {core_hi, core_lo};
        ranges[2] = {core_lo, J.lo};
      }
      const double flank_first = alpha * len * (I.increasing ? below : above) / jlen;
      const double flank_last = alpha * len * (I.increasing ? above : below) / jlen;
      const double lengths[3] = {flank_first, len - flank_first - flank_last, flank_last};
      double x = I.a;
      for (int t = 0; t < 3; ++t) {
        const double x1 = t == 2 ? I.b : x + lengths[t];
        if (x1 - x > 1e-15 && std::abs(ranges[t].second - ranges[t].first) > 1e-15) {
          segs.push_back({x, x1, ranges[t].first, ranges[t].second});
        }
        x = x1;
      }
    }
  }
  std::sort(segs.begin(), segs.end(), [](const Segment& u, const Segment& v) { return u.x0 < v.x0; });
  std::vector<AffinePiece> pieces;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    Segment s = segs[i];
    if (!pieces.empty()) s.x0 = pieces.back().hi;
    const double slope = (s.y1 - s.y0) / (s.x1 - s.x0);
    pieces.push_back({s.x0, s.x1, slope, s.y0 - slope * s.x0});
  }
  return PiecewiseAffineMap(std::move(pieces));
}

}  // namespace permuton
