// DFT precomputation, pseudo-data periodogram and the Whittle log-likelihood.
//
// All DFTs follow J_Z(w_k) = sum_{t=1..T} Z_t exp(-i w_k t) at the positive
// Fourier frequencies w_k = 2 pi k / T, k = 1..K, with K = (T-1)/2 for odd T
// and T/2 - 1 for even T (the Nyquist ordinate is dropped, and so is the zero
// frequency because the cached series are demeaned).  Caching J_Y and J_X once
// makes every subsequent likelihood evaluation O(K * m) in the regression
// coefficients: J_Z = J_Y - J_X beta.

#pragma once

#include <complex>
#include <span>
#include <vector>

#include "dlr/model.hpp"
#include "dlr/spectrum.hpp"

namespace dlr {

struct DftCache {
  int T = 0;
  std::vector<double> omegas;                          // 2 pi (k+1) / T
  std::vector<std::complex<double>> J_y;               // response DFT
  std::vector<std::vector<std::complex<double>>> J_x;  // one DFT per regressor
  double y_mean = 0.0;
  std::vector<double> x_means;

  int K() const { return static_cast<int>(omegas.size()); }
  int m() const { return static_cast<int>(J_x.size()); }
};

// Demeans y and every column of X, then transforms.  Requires T >= 8 and
// finite inputs (NaN is a domain error).  A rank-deficient X triggers a
// warning on stderr, not an error.
DftCache precompute_dft(std::span<const double> y, const std::vector<std::vector<double>>& X);

// J_Y - J_X beta per frequency.
std::vector<std::complex<double>> pseudo_dft(const DftCache& cache, std::span<const double> beta);

// I_Z(w_k) = |J_Z(w_k)|^2 / (2 pi T)
std::vector<double> periodogram(std::span<const std::complex<double>> J_z, int T);

// l_W = -sum_k [ log f(w_k) + I_Z(w_k)/f(w_k) ], optionally dropping the
// k_cut lowest ordinates.  ARFIMA input emits a one-process-wide warning that
// the approximation degrades at low frequencies, but still evaluates.
// Throws std::runtime_error if f is non-finite at a grid frequency.
double whittle_loglik(const DftCache& cache, const ParamVector& theta, const ModelSpec& spec,
                      int k_cut = 0);

}  // namespace dlr
