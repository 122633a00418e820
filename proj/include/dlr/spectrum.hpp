// Spectral densities for ARMA / ARFIMA / (seasonal) ARTFIMA error processes
// and autocovariance sequences derived from them.

#pragma once

#include <vector>

#include "dlr/model.hpp"

namespace dlr {

struct SpectrumGrid {
  std::vector<double> omegas;  // in (0, pi]
  std::vector<double> values;  // power per radian
};

// Power spectral density
//   f(w) = sigma2/(2 pi) * |1 - e^{-(lambda + i w)}|^{-2 d}
//          * |psi(e^{-iw}) / phi(e^{-iw})|^2
//          * |psi_star(e^{-i s w}) / phi_star(e^{-i s w})|^2
// with lambda = 0 for ARFIMA and the tempered factor absent for ARMA.
// Symmetric in w.  Throws std::domain_error at w = 0 for ARFIMA with d > 0
// (the density diverges there) and for |w| > pi.
double spectral_density(double omega, const ParamVector& theta, const ModelSpec& spec);

// gamma(k), k = 0..max_lag, by inverse FFT of the spectral density on a grid
// of N = next power of two >= max(8*max_lag, 2^14) points, enlarged until an
// aliasing check on the tail lags passes.  For ARFIMA the spectrum has a
// power-law singularity at zero which an FFT alone resolves poorly, so the
// fractional-noise part is split off and handled by its exact Gamma-function
// recursion while the FFT integrates only the smooth ARMA-shaped remainder.
// Throws std::domain_error for non-stationary inputs and std::runtime_error
// if the grid fails to converge.
std::vector<double> autocovariance(const ParamVector& theta, const ModelSpec& spec, int max_lag);

// Evenly spaced density values for plotting, omegas = pi*(k+1)/n, k = 0..n-1.
SpectrumGrid spectrum_grid(const ParamVector& theta, const ModelSpec& spec, int n);

}  // namespace dlr
