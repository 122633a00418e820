#include "doctest.h"

#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "dlr/model.hpp"
#include "dlr/spectrum.hpp"
#include "dlr/whittle.hpp"

using namespace dlr;

namespace {

std::vector<double> random_series(int T, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> norm(0.0, 1.0);
  std::vector<double> y(T);
  for (auto& v : y) v = norm(rng);
  return y;
}

// O(T K) reference DFT of a demeaned series, J(w_k) = sum_t z_t e^{-i w_k t}.
std::vector<std::complex<double>> direct_dft(const std::vector<double>& y, int K) {
  const int T = static_cast<int>(y.size());
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= T;
  std::vector<std::complex<double>> J(K);
  for (int k = 0; k < K; ++k) {
    const double omega = 2.0 * M_PI * (k + 1) / T;
    std::complex<double> acc(0.0, 0.0);
    for (int t = 1; t <= T; ++t)
      acc += (y[t - 1] - mean) * std::exp(std::complex<double>(0.0, -omega * t));
    J[k] = acc;
  }
  return J;
}

}  // namespace

TEST_CASE("cached DFT matches the direct definition at every kept frequency") {
  for (int T : {15, 16, 31, 64}) {
    auto y = random_series(T, 100 + T);
    DftCache cache = precompute_dft(y, {});
    const int K_expected = (T % 2 == 1) ? (T - 1) / 2 : T / 2 - 1;
    REQUIRE(cache.K() == K_expected);
    REQUIRE(cache.T == T);
    auto J_ref = direct_dft(y, K_expected);
    for (int k = 0; k < K_expected; ++k) {
      CHECK(cache.omegas[k] == doctest::Approx(2.0 * M_PI * (k + 1) / T).epsilon(1e-14));
      CHECK(std::abs(cache.J_y[k] - J_ref[k]) <= 1e-9 * (1.0 + std::abs(J_ref[k])));
    }
  }
}

TEST_CASE("adding a constant to the series leaves the cached DFT unchanged") {
  auto y = random_series(40, 7);
  DftCache base = precompute_dft(y, {});
  std::vector<double> shifted = y;
  for (auto& v : shifted) v += 123.456;
  DftCache moved = precompute_dft(shifted, {});
  for (int k = 0; k < base.K(); ++k)
    CHECK(std::abs(base.J_y[k] - moved.J_y[k]) <= 1e-9 * (1.0 + std::abs(base.J_y[k])));
  CHECK(moved.y_mean == doctest::Approx(base.y_mean + 123.456).epsilon(1e-12));
}

TEST_CASE("Parseval identity holds on the positive-frequency grid") {
  // Odd T: the DFT energy at k = 1..K counts everything except the zero
  // frequency, which the demeaning removes.
  const int T = 257;
  auto y = random_series(T, 3);
  DftCache cache = precompute_dft(y, {});
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= T;
  double ss = 0.0;
  for (double v : y) ss += (v - mean) * (v - mean);
  double energy = 0.0;
  for (int k = 0; k < cache.K(); ++k) energy += std::norm(cache.J_y[k]);
  CHECK(2.0 * energy / T == doctest::Approx(ss).epsilon(1e-9));

  // Equivalent statement through the periodogram: sum I(w_k) * (2 pi / T)
  // doubled over negative frequencies recovers the sample variance.
  auto I = periodogram(cache.J_y, T);
  double integral = 0.0;
  for (double v : I) integral += v;
  integral *= 2.0 * (2.0 * M_PI / T);
  CHECK(integral == doctest::Approx(ss / T).epsilon(1e-9));
}

TEST_CASE("pseudo-data DFT is linear in the regression coefficients") {
  const int T = 48;
  auto y = random_series(T, 21);
  std::vector<std::vector<double>> X = {random_series(T, 22), random_series(T, 23)};
  DftCache cache = precompute_dft(y, X);
  REQUIRE(cache.m() == 2);

  std::vector<double> beta = {1.7, -0.4};
  auto J_z = pseudo_dft(cache, beta);
  for (int k = 0; k < cache.K(); ++k) {
    std::complex<double> expected =
        cache.J_y[k] - beta[0] * cache.J_x[0][k] - beta[1] * cache.J_x[1][k];
    CHECK(std::abs(J_z[k] - expected) <= 1e-9 * (1.0 + std::abs(expected)));
  }

  // beta = 0 reduces to the response DFT.
  auto J_z0 = pseudo_dft(cache, std::vector<double>{0.0, 0.0});
  for (int k = 0; k < cache.K(); ++k) CHECK(std::abs(J_z0[k] - cache.J_y[k]) <= 1e-12);

  // Residual route: transforming y - X beta directly gives the same answer.
  std::vector<double> resid(T);
  for (int t = 0; t < T; ++t) resid[t] = y[t] - beta[0] * X[0][t] - beta[1] * X[1][t];
  DftCache res_cache = precompute_dft(resid, {});
  for (int k = 0; k < cache.K(); ++k)
    CHECK(std::abs(J_z[k] - res_cache.J_y[k]) <= 1e-9 * (1.0 + std::abs(J_z[k])));
}

TEST_CASE("whittle_loglik equals the explicit sum over the frequency grid") {
  const int T = 128;
  auto y = random_series(T, 5);
  DftCache cache = precompute_dft(y, {});

  ModelSpec spec;
  spec.p = 1;
  spec.q = 1;
  ParamVector theta;
  theta.phi = {0.5};
  theta.psi = {0.2};
  theta.sigma2_eps = 1.4;

  auto J_z = pseudo_dft(cache, {});
  auto I = periodogram(J_z, T);
  for (int k_cut : {0, 1, 5}) {
    double expected = 0.0;
    for (int k = k_cut; k < cache.K(); ++k) {
      double f = spectral_density(cache.omegas[k], theta, spec);
      expected -= std::log(f) + I[k] / f;
    }
    CHECK(whittle_loglik(cache, theta, spec, k_cut) ==
          doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("periodogram applies the 1/(2 pi T) normalisation") {
  std::vector<std::complex<double>> J = {{3.0, 4.0}};
  auto I = periodogram(J, 10);
  REQUIRE(I.size() == 1);
  CHECK(I[0] == doctest::Approx(25.0 / (2.0 * M_PI * 10.0)).epsilon(1e-14));
}

TEST_CASE("precompute_dft validates its inputs") {
  CHECK_THROWS_AS((void)precompute_dft(std::vector<double>{1, 2, 3}, {}), std::domain_error);
  auto y = random_series(16, 1);
  y[7] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS((void)precompute_dft(y, {}), std::domain_error);

  auto ok = random_series(16, 1);
  std::vector<std::vector<double>> bad_X = {random_series(15, 2)};  // length mismatch
  CHECK_THROWS_AS((void)precompute_dft(ok, bad_X), std::domain_error);
}

TEST_CASE("whittle_loglik is invariant to a level shift in the data") {
  const int T = 96;
  auto y = random_series(T, 9);
  std::vector<double> shifted = y;
  for (auto& v : shifted) v += 55.0;
  ModelSpec spec;
  spec.p = 1;
  ParamVector theta;
  theta.phi = {0.3};
  theta.sigma2_eps = 1.0;
  DftCache a = precompute_dft(y, {});
  DftCache b = precompute_dft(shifted, {});
  CHECK(whittle_loglik(a, theta, spec) ==
        doctest::Approx(whittle_loglik(b, theta, spec)).epsilon(1e-10));
}

TEST_CASE("whittle_loglik evaluates ARFIMA spectra on the positive grid") {
  // The lowest Fourier frequency is 2 pi / T > 0, so the ARFIMA singularity
  // at zero is never touched; the likelihood must be finite.
  const int T = 200;
  auto y = random_series(T, 31);
  DftCache cache = precompute_dft(y, {});
  ModelSpec spec;
  spec.family = Family::arfima;
  ParamVector theta;
  theta.d_frac = 0.45;
  theta.sigma2_eps = 1.0;
  double ll = whittle_loglik(cache, theta, spec);
  CHECK(std::isfinite(ll));
}
