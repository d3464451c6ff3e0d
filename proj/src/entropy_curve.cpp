#include "permuton/entropy_curve.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "permuton/entropy.hpp"
#include "permuton/exact.hpp"
#include "permuton/report.hpp"

namespace permuton {

EntropyCurveRow make_curve_row(int n, double H) {
  EntropyCurveRow r;
  r.n = n;
  r.H = H;
  r.H_per_n = H / n;
  r.H_per_nlogn = n > 1 ? H / (n * std::log(static_cast<double>(n))) : std::numeric_limits<double>::quiet_NaN();
  return r;
}

std::vector<double> EntropyCurve::values() const {
  std::vector<double> v;
  for (const auto& r : rows) v.push_back(r.H);
  return v;
}

std::string EntropyCurve::to_csv() const {
  std::ostringstream os;
  os << "n,H,H_per_n,H_per_nlogn";
  if (estimated) os << ",stderr,distinct_patterns";
  os << "\n";
  for (const auto& r : rows) {
    os << r.n << ',' << format_double(r.H) << ',' << format_double(r.H_per_n) << ',' << format_double(r.H_per_nlogn);
    if (estimated) os << ',' << format_double(r.stderr_) << ',' << r.distinct_patterns;
    os << "\n";
  }
  return os.str();
}

EntropyCurve exact_entropy_curve(const PermutonModel& mu, int n_max) {
  EntropyCurve c;
  for (int n = 1; n <= n_max; ++n) c.rows.push_back(make_curve_row(n, shannon_entropy(exact_distribution(mu, n))));
  return c;
}

EntropyCurve estimated_entropy_curve(const PermutonModel& mu, int n_max, std::uint64_t samples, Rng& rng,
                                     EntropyMethod method, const EstimateOptions& opt) {
  EntropyCurve c;
  c.estimated = true;
  for (int n = 1; n <= n_max; ++n) {
    const EntropyEstimate e = estimate_sampling_entropy(mu, n, samples, rng, method, opt);
    EntropyCurveRow r = make_curve_row(n, e.value);
    r.stderr_ = e.stderr_;
    r.distinct_patterns = e.distinct_patterns;
    c.rows.push_back(r);
  }
  return c;
}

}  // namespace permuton
