#include "permuton/profile.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "permuton/error.hpp"

namespace permuton {

std::vector<double> uniform_x_grid(int points) {
  if (points < 1) throw ValidationError("uniform_x_grid: need at least one point");
  std::vector<double> x(points);
  for (int i = 0; i < points; ++i) x[i] = static_cast<double>(i) / points;
  return x;
}

LogPeriodicProfile log_periodic_profile(const std::function<double(std::uint64_t)>& seq, double eta,
                                        const std::vector<int>& m_values, const std::vector<double>& x_grid,
                                        std::uint64_t max_index) {
  if (!(eta > 1.0)) throw ValidationError("log_periodic_profile: eta must exceed 1");
  if (m_values.empty() || x_grid.empty()) throw ValidationError("log_periodic_profile: empty m range or x grid");
  LogPeriodicProfile p;
  p.eta = eta;
  p.m_values = m_values;
  p.x_grid = x_grid;
  for (int m : m_values) {
    std::vector<double> row;
    row.reserve(x_grid.size());
    for (double x : x_grid) {
      const double v = std::floor(std::pow(eta, x + m));
      if (!(v >= 0.0) || v > static_cast<double>(max_index)) {
        throw ValidationError("log_periodic_profile: index " + std::to_string(v) + " exceeds available range " +
                              std::to_string(max_index));
      }
      row.push_back(seq(static_cast<std::uint64_t>(v)));
    }
    p.values.push_back(std::move(row));
  }
  for (std::size_t i = 1; i < p.values.size(); ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < x_grid.size(); ++j) d = std::max(d, std::abs(p.values[i][j] - p.values[i - 1][j]));
    p.sup_distances.push_back(d);
  }
  return p;
}

std::vector<double> LogPeriodicProfile::distances_to(const std::function<double(double)>& reference) const {
  std::vector<double> out;
  for (const auto& row : values) {
    double d = 0.0;
    for (std::size_t j = 0; j < x_grid.size(); ++j) d = std::max(d, std::abs(row[j] - reference(x_grid[j])));
    out.push_back(d);
  }
  return out;
}

}  // namespace permuton
