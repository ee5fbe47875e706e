#pragma once

#include <cstddef>
#include <vector>

namespace gsim {

// Total variation distance between two distributions over the same index set.
double tv_distance(const std::vector<double>& p, const std::vector<double>& q);

// Goodness-of-fit chi-squared p-value of observed counts against a reference
// distribution (which must sum to 1). Cells with expected count below 5 are
// pooled before the statistic is formed.
double chi2_pvalue(const std::vector<size_t>& counts,
                   const std::vector<double>& reference);

// Two-sample chi-squared p-value for the homogeneity of two histograms over
// the same index set, with the same pooling rule on expected counts.
double chi2_two_sample_pvalue(const std::vector<size_t>& a,
                              const std::vector<size_t>& b);

struct StatSummary {
  double tv = 0.0;
  double chi2_p = 1.0;
};

// Empirical TV distance and goodness-of-fit p-value in one call.
StatSummary stat_tests(const std::vector<size_t>& counts,
                       const std::vector<double>& reference);

// Least-squares slope of y against x (used for log-log scaling fits).
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace gsim
