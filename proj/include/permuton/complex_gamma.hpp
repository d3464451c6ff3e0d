#pragma once

#include <complex>

namespace permuton {

// Principal-branch log-Gamma (continuous off the negative real axis, with
// lgamma(z+1) = lgamma(z) + log z). Lanczos g = 7, 9 coefficients.
std::complex<double> complex_lgamma(std::complex<double> z);

std::complex<double> complex_gamma(std::complex<double> z);

// log |Gamma(l + i y)| for integer l >= 1 from the exact product identity
// |Gamma(l+iy)|^2 = (pi y / sinh(pi y)) prod_{k<l} (k^2 + y^2).
double log_abs_gamma_vertical(int l, double y);

}  // namespace permuton
