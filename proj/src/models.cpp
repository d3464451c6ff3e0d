#include "permuton/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "permuton/error.hpp"

namespace permuton {

namespace {
constexpr int kMaxRetries = 100;

double overlap(double a1, double a2, double b1, double b2) {
  return std::max(0.0, std::min(a2, b2) - std::max(a1, b1));
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;
}  // namespace

BlockPermuton::BlockPermuton(Permutation pi, std::optional<std::vector<double>> weights) : pi_(std::move(pi)) {
  const int m = pi_.size();
  if (m == 0) throw ValidationError("block permuton: empty permutation");
  if (weights) {
    weights_ = std::move(*weights);
    if (static_cast<int>(weights_.size()) != m) {
      throw ValidationError("block permuton: weights length must equal |pi|");
    }
    double s = 0.0;
    for (double w : weights_) {
      if (!(w > 0.0)) throw ValidationError("block permuton: weights must be positive");
      s += w;
    }
    if (std::abs(s - 1.0) > 1e-9) throw ValidationError("block permuton: weights must sum to 1");
  } else {
    weights_.assign(m, 1.0 / m);
  }
  x_off_.resize(m);
  y_off_.assign(m, 0.0);
  double acc = 0.0;
  for (int i = 0; i < m; ++i) {
    x_off_[i] = acc;
    acc += weights_[i];
  }
  std::vector<double> by_value(m + 1, 0.0);
  for (int i = 0; i < m; ++i) by_value[pi_[i]] = weights_[i];
  std::vector<double> below(m + 1, 0.0);
  for (int v = 2; v <= m; ++v) below[v] = below[v - 1] + by_value[v - 1];
  for (int i = 0; i < m; ++i) y_off_[i] = below[pi_[i]];
}

GridDensityPermuton::GridDensityPermuton(int m, std::vector<double> density_row_major)
    : m_(m), density_(std::move(density_row_major)) {
  if (m < 1) throw ValidationError("grid density: resolution must be >= 1");
  if (density_.size() != static_cast<std::size_t>(m) * m) {
    throw ValidationError("grid density: expected m*m density values");
  }
  for (double v : density_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("grid density: densities must be finite and non-negative");
  }
  const double target = 1.0 / m;
  for (int i = 0; i < m; ++i) {
    double col = 0.0;
    double row = 0.0;
    for (int j = 0; j < m; ++j) {
      col += cell_mass(i, j);
      row += cell_mass(j, i);
    }
    if (std::abs(col - target) > 1e-9 || std::abs(row - target) > 1e-9) {
      throw ValidationError("grid density: marginals are not uniform");
    }
  }
}

std::string model_kind(const PermutonModel& mu) {
  return std::visit(Overloaded{[](const LebesguePermuton&) { return std::string("lebesgue"); },
                               [](const BlockPermuton&) { return std::string("block"); },
                               [](const FunctionPermuton&) { return std::string("function"); },
                               [](const GridDensityPermuton&) { return std::string("grid"); },
                               [](const TreePermuton&) { return std::string("tree"); }},
                    mu);
}

PatternSampler::PatternSampler(const PermutonModel& mu) : mu_(mu) {
  if (const auto* b = std::get_if<BlockPermuton>(&mu_)) {
    double acc = 0.0;
    for (double w : b->weights()) cumulative_.push_back(acc += w);
    cumulative_.back() = 1.0;
  } else if (const auto* g = std::get_if<GridDensityPermuton>(&mu_)) {
    double acc = 0.0;
    const int m = g->resolution();
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) cumulative_.push_back(acc += g->cell_mass(i, j));
    }
    for (auto& c : cumulative_) c /= acc;
    cumulative_.back() = 1.0;
  }
}

namespace {
std::size_t pick(const std::vector<double>& cumulative, double u) {
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) --it;
  return static_cast<std::size_t>(it - cumulative.begin());
}
}  // namespace

void PatternSampler::draw_points(int n, Rng& rng) {
  points_.resize(n);
  std::visit(Overloaded{
                 [&](const LebesguePermuton&) {
                   for (auto& p : points_) p = {rng.uniform(), rng.uniform()};
                 },
                 [&](const BlockPermuton& b) {
                   for (auto& p : points_) {
                     const auto i = static_cast<int>(pick(cumulative_, rng.uniform()));
                     const double w = b.weights()[i];
                     p = {b.x_offset(i) + w * rng.uniform(), b.y_offset(i) + w * rng.uniform()};
                   }
                 },
                 [&](const FunctionPermuton& fm) {
                   for (auto& p : points_) {
                     const double x = rng.uniform();
                     p = {x, fm.f(x)};
                   }
                 },
                 [&](const GridDensityPermuton& g) {
                   const int m = g.resolution();
                   for (auto& p : points_) {
                     const std::size_t c = pick(cumulative_, rng.uniform());
                     const auto i = static_cast<double>(c / m);
                     const auto j = static_cast<double>(c % m);
                     p = {(i + rng.uniform()) / m, (j + rng.uniform()) / m};
                   }
                 },
                 [&](const TreePermuton&) {},
             },
             mu_);
}

std::span<const int> PatternSampler::draw(int n, Rng& rng) {
  if (n < 1) throw ValidationError("sample_pattern: n must be >= 1");
  pattern_.resize(n);
  if (const auto* t = std::get_if<TreePermuton>(&mu_)) {
    sample_tree_pattern_into(t->handle, n, rng, pattern_.data());
    return pattern_;
  }
  order_.resize(n);
  for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
    draw_points(n, rng);
    std::iota(order_.begin(), order_.end(), 0);
    std::sort(order_.begin(), order_.end(), [&](int a, int b) { return points_[a].x < points_[b].x; });
    bool tie = false;
    for (int i = 1; i < n && !tie; ++i) tie = !(points_[order_[i - 1]].x < points_[order_[i]].x);
    if (tie) continue;
    // Replace points by x-order, then rank y.
    ys_.resize(n);
    auto& ys = ys_;
    for (int i = 0; i < n; ++i) ys[i] = points_[order_[i]].y;
    std::iota(order_.begin(), order_.end(), 0);
    std::sort(order_.begin(), order_.end(), [&](int a, int b) { return ys[a] < ys[b]; });
    for (int r = 1; r < n && !tie; ++r) tie = !(ys[order_[r - 1]] < ys[order_[r]]);
    if (tie) continue;
    for (int r = 0; r < n; ++r) pattern_[order_[r]] = r + 1;
    return pattern_;
  }
  throw CollisionError("sample_pattern: coordinate collision persisted over 100 resamples");
}

Permutation sample_pattern(const PermutonModel& mu, int n, Rng& rng) {
  PatternSampler s(mu);
  auto span = s.draw(n, rng);
  return Permutation(std::vector<int>(span.begin(), span.end()));
}

BlockPermuton block_from_truncation(const TruncatedRealization& t) {
  return BlockPermuton(t.pi, t.cell_lengths);
}

namespace {

void check_rect(double x1, double x2, double y1, double y2) {
  constexpr double tol = 1e-12;
  const bool ok = x1 >= -tol && x2 <= 1.0 + tol && y1 >= -tol && y2 <= 1.0 + tol && x1 <= x2 && y1 <= y2;
  if (!ok) throw ValidationError("rect_measure: rectangle must satisfy 0 <= x1 <= x2 <= 1 and 0 <= y1 <= y2 <= 1");
}

double block_rect(const BlockPermuton& b, double x1, double x2, double y1, double y2) {
  double total = 0.0;
  const auto& w = b.weights();
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double ox = overlap(x1, x2, b.x_offset(static_cast<int>(i)), b.x_offset(static_cast<int>(i)) + w[i]);
    if (ox <= 0.0) continue;
    const double oy = overlap(y1, y2, b.y_offset(static_cast<int>(i)), b.y_offset(static_cast<int>(i)) + w[i]);
    total += ox * oy / w[i];
  }
  return total;
}

double grid_rect(const GridDensityPermuton& g, double x1, double x2, double y1, double y2) {
  const int m = g.resolution();
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    const double ox = overlap(x1, x2, static_cast<double>(i) / m, static_cast<double>(i + 1) / m);
    if (ox <= 0.0) continue;
    for (int j = 0; j < m; ++j) {
      const double oy = overlap(y1, y2, static_cast<double>(j) / m, static_cast<double>(j + 1) / m);
      if (oy > 0.0) total += ox * oy * g.density(i, j);
    }
  }
  return total;
}

int tree_depth_for(const TreePermuton& t) {
  int depth = 0;
  std::size_t cells = 1;
  while (depth < t.truncation_depth && cells * static_cast<std::size_t>(t.handle.d()) <= (std::size_t{1} << 16)) {
    cells *= static_cast<std::size_t>(t.handle.d());
    ++depth;
  }
  return depth;
}

struct TreeView {
  BlockPermuton block;
  double error_bound;
};

TreeView tree_view(const TreePermuton& t) {
  const TruncatedRealization tr = realize_truncation(t.handle, tree_depth_for(t));
  const double max_cell = *std::max_element(tr.cell_lengths.begin(), tr.cell_lengths.end());
  return {block_from_truncation(tr), 4.0 * max_cell};
}

}  // namespace

MeasureValue rect_measure(const PermutonModel& mu, double x1, double x2, double y1, double y2) {
  check_rect(x1, x2, y1, y2);
  return std::visit(
      Overloaded{
          [&](const LebesguePermuton&) { return MeasureValue{(x2 - x1) * (y2 - y1), 0.0}; },
          [&](const BlockPermuton& b) { return MeasureValue{block_rect(b, x1, x2, y1, y2), 0.0}; },
          [&](const FunctionPermuton& fm) { return MeasureValue{fm.f.rect_measure(x1, x2, y1, y2), 0.0}; },
          [&](const GridDensityPermuton& g) { return MeasureValue{grid_rect(g, x1, x2, y1, y2), 0.0}; },
          [&](const TreePermuton& t) {
            const TreeView v = tree_view(t);
            return MeasureValue{block_rect(v.block, x1, x2, y1, y2), v.error_bound};
          },
      },
      mu);
}

std::vector<double> grid_masses(const PermutonModel& mu, int g) {
  if (g < 1) throw ValidationError("grid_masses: g must be >= 1");
  std::optional<PermutonModel> replaced;
  const PermutonModel* view = &mu;
  if (const auto* t = std::get_if<TreePermuton>(&mu)) {
    replaced.emplace(tree_view(*t).block);
    view = &*replaced;
  }
  std::vector<double> out(static_cast<std::size_t>(g) * g);
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      out[static_cast<std::size_t>(i) * g + j] =
          rect_measure(*view, static_cast<double>(i) / g, static_cast<double>(i + 1) / g, static_cast<double>(j) / g,
                       static_cast<double>(j + 1) / g)
              .value;
    }
  }
  return out;
}

double box_distance_from_masses(std::span<const double> a, std::span<const double> b, int g) {
  const std::size_t gg = static_cast<std::size_t>(g);
  if (a.size() != gg * gg || b.size() != gg * gg) throw ValidationError("box_distance: mass arrays must be g*g");
  // S[i][j] = sum of (a-b) over columns < i and rows < j.
  std::vector<double> s((gg + 1) * (gg + 1), 0.0);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return s[i * (gg + 1) + j]; };
  for (std::size_t i = 1; i <= gg; ++i) {
    for (std::size_t j = 1; j <= gg; ++j) {
      at(i, j) = a[(i - 1) * gg + (j - 1)] - b[(i - 1) * gg + (j - 1)] + at(i - 1, j) + at(i, j - 1) - at(i - 1, j - 1);
    }
  }
  // For a fixed column strip the best row interval is max - min of the
  // strip's cumulative profile.
  double best = 0.0;
  for (std::size_t i1 = 0; i1 < gg; ++i1) {
    for (std::size_t i2 = i1 + 1; i2 <= gg; ++i2) {
      double lo = 0.0;
      double hi = 0.0;
      for (std::size_t j = 1; j <= gg; ++j) {
        const double c = at(i2, j) - at(i1, j);
        lo = std::min(lo, c);
        hi = std::max(hi, c);
      }
      best = std::max(best, hi - lo);
    }
  }
  return best;
}

double box_distance(const PermutonModel& mu1, const PermutonModel& mu2, int g) {
  if (g < 2) throw ValidationError("box_distance: grid must be >= 2");
  const auto a = grid_masses(mu1, g);
  const auto b = grid_masses(mu2, g);
  return box_distance_from_masses(a, b, g);
}

GridDensityPermuton rectangle_union_limit(const PiecewiseAffineMap& f, int m) {
  if (m < 1) throw ValidationError("rectangle_union_limit: m must be >= 1");
  std::vector<double> density(static_cast<std::size_t>(m) * m, 0.0);
  const double mm = static_cast<double>(m) * m;
  for (const auto& p : f.pieces()) {
    const auto [ylo, yhi] = p.image();
    const double h = yhi - ylo;
    for (int i = 0; i < m; ++i) {
      const double ox = overlap(p.lo, p.hi, static_cast<double>(i) / m, static_cast<double>(i + 1) / m);
      if (ox <= 0.0) continue;
      for (int j = 0; j < m; ++j) {
        const double oy = overlap(ylo, yhi, static_cast<double>(j) / m, static_cast<double>(j + 1) / m);
        if (oy > 0.0) density[static_cast<std::size_t>(i) * m + j] += ox * oy / h * mm;
      }
    }
  }
  return GridDensityPermuton(m, std::move(density));
}

}  // namespace permuton
