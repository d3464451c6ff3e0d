#pragma once

#include <complex>
#include <vector>

#include "permuton/decay.hpp"

namespace permuton {

// Truncated Fourier series sum_{|r|<=R} c_r exp(2 pi i r x) of a 1-periodic
// real function of x = log_eta n.
struct FourierLimit {
  double eta = 2.0;
  int R = 0;
  std::vector<std::complex<double>> coeffs;  // coeffs[r + R]
  double tail_bound = 0.0;          // sum of |c_r| over |r| > R
  double truncation_bound = 0.0;    // error from truncating an inner sum
  double coefficient_radius = 0.0;  // propagated input uncertainty

  std::complex<double> coefficient(int r) const { return coeffs.at(static_cast<std::size_t>(r + R)); }
  std::complex<double> evaluate_complex(double x) const;
  double evaluate(double x) const { return evaluate_complex(x).real(); }
  // max over a uniform x grid of |f(x) - c_0|.
  double oscillation_amplitude(int grid = 256) const;
  // Bound on the error of evaluate() from all recorded sources.
  double error_bar() const { return tail_bound + truncation_bound + coefficient_radius; }
};

// c_r = (1 - q^l) / (l! |log q|) * Gamma(l + 2 pi i r / log q), eta = 1/q.
FourierLimit log_periodic_limit_L(DecayParams params, int R = 8);

// rho_l for l = 2..L_max with optional confidence radii.
struct RhoSequence {
  std::vector<double> values;  // values[l]; entries 0 and 1 unused
  std::vector<double> radius;  // same indexing; empty means exact

  int max_index() const { return static_cast<int>(values.size()) - 1; }
  double value(int l) const { return l < static_cast<int>(values.size()) ? values[l] : 0.0; }
  double radius_at(int l) const { return l < static_cast<int>(radius.size()) ? radius[l] : 0.0; }
};

// A(x) coefficients sum_{l=1}^{L_max-1} rho_{l+1} (1 - d^-l) / ((l+1)! log d)
// * Gamma(l - 2 pi i r / log d). Truncation remainder assumes rho_l <= 2 d^2 log l.
FourierLimit composite_limit_A(int d, const RhoSequence& rho, int R, int L_max);

}  // namespace permuton
