#include "dlr/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace dlr {

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

// p-value from D with the Stephens finite-sample adjustment, where n_eff is
// the (effective) sample size.
double ks_p_value(double d, double n_eff) {
  const double sqrt_n = std::sqrt(n_eff);
  return kolmogorov_survival((sqrt_n + 0.12 + 0.11 / sqrt_n) * d);
}

}  // namespace

KsResult ks_test_exponential(std::span<const double> sample) {
  const std::size_t n = sample.size();
  if (n == 0) throw std::domain_error("ks_test_exponential: empty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(sorted[i] >= 0.0))
      throw std::domain_error("ks_test_exponential: sample values must be non-negative");
    const double cdf = -std::expm1(-sorted[i]);
    d = std::max(d, std::abs(cdf - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - cdf));
  }
  return {d, ks_p_value(d, static_cast<double>(n))};
}

KsResult ks_test_two_sample(std::span<const double> a, std::span<const double> b) {
  const std::size_t na = a.size(), nb = b.size();
  if (na == 0 || nb == 0) throw std::domain_error("ks_test_two_sample: empty sample");
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < na && j < nb) {
    const double t = std::min(sa[i], sb[j]);
    while (i < na && sa[i] <= t) ++i;
    while (j < nb && sb[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double n_eff = static_cast<double>(na) * nb / (na + nb);
  return {d, ks_p_value(d, n_eff)};
}

}  // namespace dlr
