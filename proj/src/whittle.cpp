#include "dlr/whittle.hpp"

#include <atomic>
#include <cmath>
#include <iostream>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "dlr/fft.hpp"

namespace dlr {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> demean(std::span<const double> x, double* mean_out) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - mean;
  if (mean_out) *mean_out = mean;
  return out;
}

// DFT of a demeaned series at the positive Fourier frequencies under the
// t = 1..T convention: J(w_k) = e^{-i w_k} * FFT_k for 0-based input.
std::vector<std::complex<double>> positive_freq_dft(const std::vector<double>& z, int K) {
  const int T = static_cast<int>(z.size());
  std::vector<std::complex<double>> buf(z.begin(), z.end());
  auto F = fft::forward(buf);
  std::vector<std::complex<double>> J(K);
  for (int k = 1; k <= K; ++k) {
    const double w = kTwoPi * k / T;
    J[k - 1] = std::polar(1.0, -w) * F[k];
  }
  return J;
}

void warn_rank_deficient(const std::vector<std::vector<double>>& X, int T) {
  if (X.empty()) return;
  Eigen::MatrixXd M(T, static_cast<int>(X.size()));
  for (int j = 0; j < static_cast<int>(X.size()); ++j) {
    double mean = 0.0;
    for (double v : X[j]) mean += v;
    mean /= T;
    for (int t = 0; t < T; ++t) M(t, j) = X[j][t] - mean;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
  if (qr.rank() < static_cast<int>(X.size()))
    std::cerr << "warning: regressor matrix is rank deficient after demeaning (rank " << qr.rank()
              << " of " << X.size() << ")\n";
}

std::atomic<bool> arfima_whittle_warned{false};

}  // namespace

DftCache precompute_dft(std::span<const double> y, const std::vector<std::vector<double>>& X) {
  const int T = static_cast<int>(y.size());
  if (T < 8) throw std::domain_error("precompute_dft requires T >= 8");
  for (double v : y)
    if (!std::isfinite(v)) throw std::domain_error("precompute_dft: response contains a non-finite value");
  for (const auto& col : X) {
    if (static_cast<int>(col.size()) != T)
      throw std::domain_error("precompute_dft: regressor length differs from the response");
    for (double v : col)
      if (!std::isfinite(v)) throw std::domain_error("precompute_dft: regressor contains a non-finite value");
  }
  warn_rank_deficient(X, T);

  DftCache cache;
  cache.T = T;
  const int K = (T % 2 == 1) ? (T - 1) / 2 : T / 2 - 1;
  cache.omegas.resize(K);
  for (int k = 1; k <= K; ++k) cache.omegas[k - 1] = kTwoPi * k / T;

  auto zy = demean(y, &cache.y_mean);
  cache.J_y = positive_freq_dft(zy, K);
  cache.x_means.resize(X.size());
  cache.J_x.reserve(X.size());
  for (std::size_t j = 0; j < X.size(); ++j) {
    auto zx = demean(X[j], &cache.x_means[j]);
    cache.J_x.push_back(positive_freq_dft(zx, K));
  }
  return cache;
}

std::vector<std::complex<double>> pseudo_dft(const DftCache& cache, std::span<const double> beta) {
  if (static_cast<int>(beta.size()) != cache.m())
    throw std::domain_error("pseudo_dft: beta length does not match the cached regressor count");
  std::vector<std::complex<double>> J = cache.J_y;
  for (int j = 0; j < cache.m(); ++j) {
    const double b = beta[j];
    const auto& col = cache.J_x[j];
    for (int k = 0; k < cache.K(); ++k) J[k] -= b * col[k];
  }
  return J;
}

std::vector<double> periodogram(std::span<const std::complex<double>> J_z, int T) {
  std::vector<double> I(J_z.size());
  const double denom = kTwoPi * static_cast<double>(T);
  for (std::size_t k = 0; k < J_z.size(); ++k) I[k] = std::norm(J_z[k]) / denom;
  return I;
}

double whittle_loglik(const DftCache& cache, const ParamVector& theta, const ModelSpec& spec,
                      int k_cut) {
  if (k_cut < 0 || k_cut > cache.K())
    throw std::domain_error("whittle_loglik: k_cut out of range");
  if (spec.family == Family::arfima && !arfima_whittle_warned.exchange(true))
    std::cerr << "warning: the Whittle approximation is unreliable for long-memory (ARFIMA) "
                 "errors at low frequencies; consider the exact Gaussian likelihood\n";

  auto J_z = pseudo_dft(cache, theta.beta);
  const double denom = kTwoPi * static_cast<double>(cache.T);
  double ll = 0.0;
  for (int k = k_cut; k < cache.K(); ++k) {
    const double f = spectral_density(cache.omegas[k], theta, spec);
    if (!(f > 0.0) || !std::isfinite(f))
      throw std::runtime_error("whittle_loglik: spectral density non-finite or non-positive at omega = " +
                               std::to_string(cache.omegas[k]));
    const double I = std::norm(J_z[k]) / denom;
    ll -= std::log(f) + I / f;
  }
  return ll;
}

}  // namespace dlr
