#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "permuton/estimator.hpp"
#include "permuton/models.hpp"

namespace permuton {

struct EntropyCurveRow {
  int n = 0;
  double H = 0.0;
  double H_per_n = 0.0;
  double H_per_nlogn = 0.0;  // NaN at n = 1
  double stderr_ = 0.0;      // estimate mode only
  std::uint64_t distinct_patterns = 0;
};

struct EntropyCurve {
  bool estimated = false;
  std::vector<EntropyCurveRow> rows;

  std::vector<double> values() const;
  // Header n,H,H_per_n,H_per_nlogn; estimate mode appends stderr and
  // distinct_patterns columns.
  std::string to_csv() const;
};

EntropyCurveRow make_curve_row(int n, double H);

EntropyCurve exact_entropy_curve(const PermutonModel& mu, int n_max);
EntropyCurve estimated_entropy_curve(const PermutonModel& mu, int n_max, std::uint64_t samples, Rng& rng,
                                     EntropyMethod method = EntropyMethod::Plugin, const EstimateOptions& opt = {});

}  // namespace permuton
