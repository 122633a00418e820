#pragma once

#include <span>

namespace dlr {

struct KsResult {
  double statistic;  // sup-norm distance D
  double p_value;    // asymptotic Kolmogorov p-value
};

// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_survival(double lambda);

// One-sample Kolmogorov-Smirnov test of `sample` against the standard
// exponential distribution (rate 1). Uses the Stephens small-sample
// correction of the asymptotic p-value.
KsResult ks_test_exponential(std::span<const double> sample);

// Two-sample Kolmogorov-Smirnov test.
KsResult ks_test_two_sample(std::span<const double> a, std::span<const double> b);

}  // namespace dlr
