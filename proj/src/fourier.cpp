#include "permuton/fourier.hpp"

#include <cmath>
#include <numbers>

#include "permuton/complex_gamma.hpp"
#include "permuton/error.hpp"

namespace permuton {

namespace {
constexpr int kTailHarmonics = 400;
}

std::complex<double> FourierLimit::evaluate_complex(double x) const {
  std::complex<double> s = 0.0;
  for (int r = -R; r <= R; ++r) {
    const double phase = 2.0 * std::numbers::pi * r * x;
    s += coefficient(r) * std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return s;
}

double FourierLimit::oscillation_amplitude(int grid) const {
  const double c0 = coefficient(0).real();
  double amp = 0.0;
  for (int i = 0; i < grid; ++i) amp = std::max(amp, std::abs(evaluate(static_cast<double>(i) / grid) - c0));
  return amp;
}

FourierLimit log_periodic_limit_L(DecayParams params, int R) {
  const double q = params.q;
  const int l = params.l;
  if (!(q > 0.0 && q < 1.0)) throw ValidationError("log_periodic_limit_L: q must be in (0,1)");
  if (l < 1) throw ValidationError("log_periodic_limit_L: l must be >= 1");
  if (R < 0) throw ValidationError("log_periodic_limit_L: R must be >= 0");
  const double logq = std::log(q);
  const double front = -std::expm1(l * logq) / std::abs(logq);
  const double log_lfact = std::lgamma(l + 1.0);
  FourierLimit out;
  out.eta = 1.0 / q;
  out.R = R;
  out.coeffs.resize(2 * R + 1);
  for (int r = -R; r <= R; ++r) {
    const std::complex<double> z(l, 2.0 * std::numbers::pi * r / logq);
    out.coeffs[r + R] = front * std::exp(complex_lgamma(z) - log_lfact);
  }
  // exact magnitudes beyond R; terms decay like exp(-pi |y| / 2)
  double tail = 0.0;
  for (int r = R + 1; r <= R + kTailHarmonics; ++r) {
    const double y = 2.0 * std::numbers::pi * r / logq;
    tail += 2.0 * front * std::exp(log_abs_gamma_vertical(l, y) - log_lfact);
  }
  out.tail_bound = tail;
  return out;
}

FourierLimit composite_limit_A(int d, const RhoSequence& rho, int R, int L_max) {
  if (d < 2) throw ValidationError("composite_limit_A: d must be >= 2");
  if (R < 0) throw ValidationError("composite_limit_A: R must be >= 0");
  if (L_max < 2) throw ValidationError("composite_limit_A: L_max must be >= 2");
  if (rho.max_index() < L_max) throw ValidationError("composite_limit_A: rho must cover indices up to L_max");
  const double logd = std::log(static_cast<double>(d));
  FourierLimit out;
  out.eta = d;
  out.R = R;
  out.coeffs.assign(2 * R + 1, 0.0);
  double radius = 0.0;
  double tail = 0.0;
  for (int l = 1; l <= L_max - 1; ++l) {
    const double rv = rho.value(l + 1);
    const double rr = rho.radius_at(l + 1);
    const double front = -std::expm1(-l * logd) / logd;
    const double log_fact = std::lgamma(l + 2.0);
    for (int r = -R; r <= R; ++r) {
      const std::complex<double> z(l, -2.0 * std::numbers::pi * r / logd);
      const std::complex<double> g = front * std::exp(complex_lgamma(z) - log_fact);
      out.coeffs[r + R] += rv * g;
      radius += rr * std::abs(g);
    }
    for (int r = R + 1; r <= R + kTailHarmonics; ++r) {
      const double y = 2.0 * std::numbers::pi * r / logd;
      tail += 2.0 * (std::abs(rv) + rr) * front * std::exp(log_abs_gamma_vertical(l, y) - log_fact);
    }
  }
  out.tail_bound = tail;
  out.coefficient_radius = radius;
  // |coefficient sum over l >= L_max| <= (2 d^2 / log d) sum_l log(l+1)/(l(l+1)),
  // summed over the 2R+1 retained harmonics.
  const double Lm = L_max - 1.0;
  const double per_harmonic = 2.0 * d * d / logd * ((std::log(Lm) + 1.0) / Lm + 1.0 / (2.0 * Lm * Lm));
  out.truncation_bound = (2.0 * R + 1.0) * per_harmonic;
  return out;
}

}  // namespace permuton
