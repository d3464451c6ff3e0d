#pragma once

#include <complex>
#include <vector>

namespace permuton {

struct FallingFactorialRoots {
  int d = 2;
  std::vector<std::complex<double>> roots;      // s with (s)_{d-1} = d!; roots[0] = d
  std::vector<std::complex<double>> exponents;  // x = d - s; exponents[0] = 0
};

// Companion-matrix eigenvalues polished by Newton. Throws NumericalError when
// the expected root structure (d-1 distinct roots, d among them, every other
// root with real part below d) is not confirmed.
FallingFactorialRoots falling_factorial_roots(int d);

// Candidate a(n) = (n)_{n-l} / (n+x-1)_{n-l}, evaluated with complex log-Gamma,
// substituted into the order d-1 uniform-gap recurrence
//   sum_i (-1)^{d-1-i} C(d-1,i) (n+i+d-1)_{d-1} a(n+i) = d! a(n+d-1).
// Returns the max relative residual over l <= n <= N-(d-1).
double hypergeometric_solution_check(int d, int l, std::complex<double> x, int N);

}  // namespace permuton
