#include "permuton/entropy.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "permuton/error.hpp"
#include "permuton/kahan.hpp"

namespace permuton {

double shannon_entropy(std::span<const double> probs) {
  KahanSum h;
  for (double p : probs) {
    if (p > 0.0) h.add(-p * std::log(p));
  }
  return h.value() < 0.0 ? 0.0 : h.value();
}

double shannon_entropy(const PatternDistribution& d) {
  KahanSum h;
  for (const auto& kv : d.by_rank()) h.add(-kv.second * std::log(kv.second));
  return h.value() < 0.0 ? 0.0 : h.value();
}

MixtureBounds mixture_entropy_bounds(
    std::span<const std::pair<double, PatternDistribution>> components) {
  if (components.empty()) throw ValidationError("mixture_entropy_bounds: no components");
  const int n = components.front().second.n();
  double wsum = 0.0;
  for (const auto& [w, d] : components) {
    if (d.n() != n) throw ValidationError("mixture_entropy_bounds: components have different n");
    if (!(w >= 0.0)) throw ValidationError("mixture_entropy_bounds: negative weight");
    wsum += w;
  }
  if (!(wsum > 0.0)) throw ValidationError("mixture_entropy_bounds: zero total weight");

  double lower = 0.0;
  std::vector<double> w;
  std::map<std::uint64_t, double> mix;
  for (const auto& [wk, d] : components) {
    const double a = wk / wsum;
    w.push_back(a);
    lower += a * shannon_entropy(d);
    for (const auto& [r, p] : d.by_rank()) mix[r] += a * p;
  }
  std::vector<double> mp;
  mp.reserve(mix.size());
  for (const auto& kv : mix) mp.push_back(kv.second);
  return {lower, shannon_entropy(mp), lower + shannon_entropy(w)};
}

double quasi_monotonicity_gap(std::span<const double> seq) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < seq.size(); ++i) {
    const double k = static_cast<double>(i + 1);
    worst = std::max(worst, std::abs(seq[i] - seq[i - 1]) - std::log(k));
  }
  return worst;
}

}  // namespace permuton
