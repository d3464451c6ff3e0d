#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace permuton {

// Rows A^{(m)}(x) = a(floor(eta^{x+m})) for each m, on a shared x grid.
struct LogPeriodicProfile {
  double eta = 2.0;
  std::vector<int> m_values;
  std::vector<double> x_grid;
  std::vector<std::vector<double>> values;  // values[m index][x index]
  std::vector<double> sup_distances;        // between consecutive rows

  // Sup distance of every row to a reference function of x.
  std::vector<double> distances_to(const std::function<double(double)>& reference) const;
};

// max_index bounds the indices the sequence can serve; exceeding it throws.
LogPeriodicProfile log_periodic_profile(const std::function<double(std::uint64_t)>& seq, double eta,
                                        const std::vector<int>& m_values, const std::vector<double>& x_grid,
                                        std::uint64_t max_index);

std::vector<double> uniform_x_grid(int points);

}  // namespace permuton
