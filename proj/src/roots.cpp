#include "permuton/roots.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "permuton/complex_gamma.hpp"
#include "permuton/error.hpp"

namespace permuton {

namespace {

using cd = std::complex<double>;

// Monic coefficients, highest degree first, of s(s-1)...(s-d+2) - d!.
std::vector<double> falling_factorial_poly(int d) {
  std::vector<double> c{1.0};
  for (int i = 0; i <= d - 2; ++i) {
    std::vector<double> next(c.size() + 1, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      next[k] += c[k];
      next[k + 1] -= static_cast<double>(i) * c[k];
    }
    c.swap(next);
  }
  double fact = 1.0;
  for (int i = 2; i <= d; ++i) fact *= i;
  c.back() -= fact;
  return c;
}

// Evaluates (s)_{d-1} - d! and its derivative directly in product form.
void eval_product(int d, cd s, cd& p, cd& dp) {
  cd prod = 1.0;
  cd deriv = 0.0;
  for (int i = 0; i <= d - 2; ++i) {
    const cd f = s - static_cast<double>(i);
    deriv = deriv * f + prod;
    prod *= f;
  }
  double fact = 1.0;
  for (int i = 2; i <= d; ++i) fact *= i;
  p = prod - fact;
  dp = deriv;
}

}  // namespace

FallingFactorialRoots falling_factorial_roots(int d) {
  if (d < 2) throw ValidationError("falling_factorial_roots: d must be >= 2");
  if (d > 16) throw CapExceeded("falling_factorial_roots: d above 16");
  FallingFactorialRoots out;
  out.d = d;
  const int deg = d - 1;
  std::vector<cd> roots;
  if (deg == 1) {
    roots.push_back(cd(2.0, 0.0));
  } else {
    const std::vector<double> c = falling_factorial_poly(d);
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
    for (int k = 0; k < deg; ++k) comp(0, k) = -c[k + 1];
    for (int k = 1; k < deg; ++k) comp(k, k - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    if (es.info() != Eigen::Success) throw NumericalError("falling_factorial_roots: eigenvalue solver failed");
    for (int k = 0; k < deg; ++k) roots.push_back(es.eigenvalues()[k]);
  }
  double fact = 1.0;
  for (int i = 2; i <= d; ++i) fact *= i;
  for (auto& s : roots) {
    for (int it = 0; it < 50; ++it) {
      cd p, dp;
      eval_product(d, s, p, dp);
      if (std::abs(dp) == 0.0) break;
      const cd step = p / dp;
      s -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(s))) break;
    }
    cd p, dp;
    eval_product(d, s, p, dp);
    if (std::abs(p) > 1e-9 * fact) {
      throw NumericalError("falling_factorial_roots: Newton polishing left residual " + std::to_string(std::abs(p)));
    }
  }
  // d itself must be a root
  auto it = std::min_element(roots.begin(), roots.end(),
                             [&](const cd& a, const cd& b) { return std::abs(a - cd(d)) < std::abs(b - cd(d)); });
  if (std::abs(*it - cd(d)) > 1e-9 * d) throw NumericalError("falling_factorial_roots: s = d not found among roots");
  *it = cd(d, 0.0);
  std::iter_swap(roots.begin(), it);
  std::sort(roots.begin() + 1, roots.end(), [](const cd& a, const cd& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() < b.imag();
  });
  for (std::size_t i = 0; i < roots.size(); ++i) {
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      if (std::abs(roots[i] - roots[j]) < 1e-8 * std::max(1.0, std::abs(roots[i]))) {
        throw NumericalError("falling_factorial_roots: roots are not distinct");
      }
    }
    if (i > 0 && !(roots[i].real() < d)) {
      throw NumericalError("falling_factorial_roots: a root other than d has real part >= d");
    }
  }
  out.roots = roots;
  for (const auto& s : roots) out.exponents.push_back(cd(d) - s);
  out.exponents[0] = cd(0.0, 0.0);
  return out;
}

double hypergeometric_solution_check(int d, int l, std::complex<double> x, int N) {
  if (d < 2) throw ValidationError("hypergeometric_solution_check: d must be >= 2");
  if (l < 1) throw ValidationError("hypergeometric_solution_check: l must be >= 1");
  const int top = N;
  // (n+x-1)_{n-l} = Gamma(n+x) / Gamma(l+x): factors l+x .. n+x-1
  if (x.imag() == 0.0 && x.real() == std::floor(x.real()) && l + x.real() <= 0.0) {
    throw NumericalError("hypergeometric_solution_check: falling factorial has a zero factor (pole) for x = " +
                         std::to_string(x.real()));
  }
  const cd lg_l_x = complex_lgamma(cd(l) + x);
  const double lg_l1 = std::lgamma(l + 1.0);
  auto a = [&](int n) -> cd {
    if (n < l) return 0.0;
    return std::exp(cd(std::lgamma(n + 1.0) - lg_l1) - (complex_lgamma(cd(n) + x) - lg_l_x));
  };
  double fact = 1.0;
  for (int i = 2; i <= d; ++i) fact *= i;
  auto falling = [&](double v, int m) {
    double p = 1.0;
    for (int i = 0; i < m; ++i) p *= v - i;
    return p;
  };
  double worst = 0.0;
  for (int n = l; n + d - 1 <= top; ++n) {
    cd lhs = 0.0;
    double scale = 0.0;
    double binom = 1.0;
    for (int i = 0; i <= d - 1; ++i) {
      if (i > 0) binom = binom * (d - i) / i;
      const double sign = (d - 1 - i) % 2 == 0 ? 1.0 : -1.0;
      const cd term = sign * binom * falling(n + i + d - 1, d - 1) * a(n + i);
      lhs += term;
      scale += std::abs(term);
    }
    const cd rhs = fact * a(n + d - 1);
    scale += std::abs(rhs);
    if (scale == 0.0) continue;
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

}  // namespace permuton
