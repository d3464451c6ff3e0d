#include "permuton/complex_gamma.hpp"

#include <cmath>
#include <numbers>

#include "permuton/error.hpp"

namespace permuton {

namespace {

constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7,
};

bool is_nonpositive_integer(std::complex<double> z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

// Valid for Re z >= 0.5.
std::complex<double> lanczos_lgamma(std::complex<double> z) {
  const std::complex<double> zm = z - 1.0;
  std::complex<double> x = kLanczos[0];
  for (int k = 1; k < 9; ++k) x += kLanczos[k] / (zm + static_cast<double>(k));
  const std::complex<double> t = zm + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (zm + 0.5) * std::log(t) - t + std::log(x);
}

}  // namespace

std::complex<double> complex_lgamma(std::complex<double> z) {
  if (is_nonpositive_integer(z)) throw NumericalError("complex_lgamma: pole at non-positive integer");
  if (z.real() >= 0.5) return lanczos_lgamma(z);
  // Shift right with lgamma(z) = lgamma(z+m) - sum log(z+k); keeps the branch.
  const int m = static_cast<int>(std::ceil(0.5 - z.real()));
  std::complex<double> acc = 0.0;
  for (int k = 0; k < m; ++k) acc += std::log(z + static_cast<double>(k));
  return lanczos_lgamma(z + static_cast<double>(m)) - acc;
}

std::complex<double> complex_gamma(std::complex<double> z) {
  if (is_nonpositive_integer(z)) throw NumericalError("complex_gamma: pole at non-positive integer");
  if (z.real() >= 0.5) return std::exp(lanczos_lgamma(z));
  // Reflection keeps relative accuracy near the negative real axis.
  const double pi = std::numbers::pi;
  return pi / (std::sin(pi * z) * std::exp(lanczos_lgamma(1.0 - z)));
}

double log_abs_gamma_vertical(int l, double y) {
  if (l < 1) throw ValidationError("log_abs_gamma_vertical: l must be >= 1");
  double s = 0.0;
  const double ay = std::abs(y);
  if (ay > 0.0) {
    const double x = std::numbers::pi * ay;
    // log(x / sinh x) with sinh x = e^x (1 - e^{-2x}) / 2
    s = std::log(x) - (x + std::log1p(-std::exp(-2.0 * x)) - std::log(2.0));
  }
  for (int k = 1; k < l; ++k) s += std::log(static_cast<double>(k) * k + y * y);
  return 0.5 * s;
}

}  // namespace permuton
