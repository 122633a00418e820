#include "dlr/spectrum.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "dlr/fft.hpp"

namespace dlr {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// |1 + sum c_j z^j|^2 at z = e^{-iw}, with the sign convention folded into c.
double squared_modulus_poly(const std::vector<double>& c, double omega, double coef_sign) {
  std::complex<double> z = std::polar(1.0, -omega);
  std::complex<double> acc(0.0, 0.0);
  for (std::size_t j = c.size(); j-- > 0;) acc = (acc + coef_sign * c[j]) * z;
  acc += 1.0;
  return std::norm(acc);
}

// ARMA transfer |psi/phi|^2 including seasonal blocks.
double arma_ratio(const ParamVector& theta, const ModelSpec& spec, double omega) {
  double value = 1.0;
  if (!theta.psi.empty()) value *= squared_modulus_poly(theta.psi, omega, +1.0);
  if (!theta.phi.empty()) value /= squared_modulus_poly(theta.phi, omega, -1.0);
  if (spec.s >= 2) {
    const double so = spec.s * omega;
    if (!theta.psi_star.empty()) value *= squared_modulus_poly(theta.psi_star, so, +1.0);
    if (!theta.phi_star.empty()) value /= squared_modulus_poly(theta.phi_star, so, -1.0);
  }
  return value;
}

// |1 - e^{-(lambda + i w)}|^2 = (1 - e^{-lambda})^2 + 4 e^{-lambda} sin^2(w/2),
// written to stay accurate near w = 0 for small lambda.
double tempered_squared_modulus(double lambda, double omega) {
  const double em = std::exp(-lambda);
  const double s = std::sin(0.5 * omega);
  const double one_minus = -std::expm1(-lambda);  // 1 - e^{-lambda}
  return one_minus * one_minus + 4.0 * em * s * s;
}

void check_stationary(const ParamVector& theta, const ModelSpec& spec) {
  ar_to_pacf(theta.phi);       // throws when non-stationary
  ar_to_pacf(theta.phi_star);
  if (!(theta.sigma2_eps > 0.0)) throw std::domain_error("sigma2_eps must be positive");
  if (spec.family == Family::arfima && !(std::abs(theta.d_frac) < 0.5))
    throw std::domain_error("ARFIMA autocovariance requires |d| < 0.5");
  if (spec.family == Family::artfima && !(theta.lambda > 0.0))
    throw std::domain_error("ARTFIMA requires lambda > 0");
}

// Unit-innovation fractional noise autocovariance (Hosking):
//   g(0) = Gamma(1-2d) / Gamma(1-d)^2,  g(k+1) = g(k) (k+d)/(k+1-d).
std::vector<double> fractional_noise_acv(double d, int max_lag) {
  std::vector<double> g(static_cast<std::size_t>(max_lag) + 1);
  g[0] = std::exp(std::lgamma(1.0 - 2.0 * d) - 2.0 * std::lgamma(1.0 - d));
  for (int k = 0; k < max_lag; ++k) g[k + 1] = g[k] * (k + d) / (k + 1.0 - d);
  return g;
}

// gamma(k) = (2 pi / N) * rectangle rule of f(w) e^{iwk} over the grid
// w_j = 2 pi j / N, done with one FFT.  Returns lags 0..max_lag plus the
// largest |gamma| over the high-lag tail window, which serves as an
// a-posteriori aliasing check on the grid resolution.
struct AcvFromGrid {
  std::vector<double> gamma;
  double tail = 0.0;
};

AcvFromGrid grid_to_acv(const std::vector<double>& values, int max_lag) {
  const std::size_t n = values.size();
  std::vector<std::complex<double>> buf(values.begin(), values.end());
  auto spec_fft = fft::forward(buf);  // real even input -> real even output
  const double scale = kTwoPi / static_cast<double>(n);
  AcvFromGrid out;
  out.gamma.resize(static_cast<std::size_t>(max_lag) + 1);
  for (int k = 0; k <= max_lag; ++k) out.gamma[k] = spec_fft[k].real() * scale;
  for (std::size_t k = n / 2 - n / 8; k <= n / 2; ++k)
    out.tail = std::max(out.tail, std::abs(spec_fft[k].real()) * scale);
  return out;
}

std::vector<double> sample_even_grid(const std::vector<double>& half, std::size_t n) {
  // half holds values at j = 0..n/2; mirror to the full circle.
  std::vector<double> full(n);
  for (std::size_t j = 0; j <= n / 2; ++j) full[j] = half[j];
  for (std::size_t j = n / 2 + 1; j < n; ++j) full[j] = half[n - j];
  return full;
}

}  // namespace

double spectral_density(double omega, const ParamVector& theta, const ModelSpec& spec) {
  if (!(std::abs(omega) <= std::numbers::pi + 1e-12))
    throw std::domain_error("spectral_density requires omega in [-pi, pi]");
  double value = theta.sigma2_eps / kTwoPi * arma_ratio(theta, spec, omega);
  switch (spec.family) {
    case Family::arma:
      break;
    case Family::arfima: {
      const double s2 = 4.0 * std::pow(std::sin(0.5 * omega), 2);  // |1 - e^{-iw}|^2
      if (s2 == 0.0) {
        if (theta.d_frac > 0.0)
          throw std::domain_error("ARFIMA spectral density diverges at omega = 0 for d > 0");
        value = (theta.d_frac == 0.0) ? value : 0.0;
      } else {
        value *= std::pow(s2, -theta.d_frac);
      }
      break;
    }
    case Family::artfima:
      value *= std::pow(tempered_squared_modulus(theta.lambda, omega), -theta.d_frac);
      break;
  }
  return value;
}

std::vector<double> autocovariance(const ParamVector& theta, const ModelSpec& spec, int max_lag) {
  if (max_lag < 0) throw std::domain_error("max_lag must be non-negative");
  check_stationary(theta, spec);

  const bool arfima_split = spec.family == Family::arfima && theta.d_frac != 0.0;
  const double d = theta.d_frac;

  // Exact fractional-noise part of the split; the FFT then only sees the
  // remainder, whose integrand vanishes like w^{2-2d} at the origin.
  double r0 = 1.0;
  std::vector<double> frac_part;
  if (arfima_split) {
    r0 = arma_ratio(theta, spec, 0.0);
    frac_part = fractional_noise_acv(d, max_lag);
  }

  const bool pure_fractional_noise =
      arfima_split && theta.phi.empty() && theta.psi.empty() && theta.phi_star.empty() && theta.psi_star.empty();
  if (pure_fractional_noise) {
    std::vector<double> gamma(frac_part);
    for (double& g : gamma) g *= theta.sigma2_eps;
    return gamma;
  }

  std::size_t n = fft::next_pow2(std::max<std::size_t>(8 * static_cast<std::size_t>(std::max(max_lag, 1)),
                                                       std::size_t{1} << 14));
  if (arfima_split) n = std::max(n, std::size_t{1} << 16);
  constexpr std::size_t kMaxGrid = std::size_t{1} << 21;

  while (true) {
    std::vector<double> half(n / 2 + 1);
    for (std::size_t j = 0; j <= n / 2; ++j) {
      const double w = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
      if (arfima_split) {
        if (j == 0) {
          half[j] = 0.0;  // limit of S(w) (R(w) - R(0)) as w -> 0
        } else {
          const double s2 = 4.0 * std::pow(std::sin(0.5 * w), 2);
          half[j] = theta.sigma2_eps / kTwoPi * std::pow(s2, -d) * (arma_ratio(theta, spec, w) - r0);
        }
      } else {
        half[j] = spectral_density(w, theta, spec);
      }
    }
    auto full = sample_even_grid(half, n);
    auto acv = grid_to_acv(full, max_lag);
    if (arfima_split)
      for (int k = 0; k <= max_lag; ++k) acv.gamma[k] += theta.sigma2_eps * r0 * frac_part[k];
    const double scale = std::max(std::abs(acv.gamma[0]), 1e-300);
    if (acv.tail <= 1e-10 * scale || n >= kMaxGrid) {
      if (acv.tail > 1e-7 * scale)
        throw std::runtime_error("autocovariance grid failed to converge (autocovariance tail too heavy)");
      return acv.gamma;
    }
    n *= 2;
  }
}

SpectrumGrid spectrum_grid(const ParamVector& theta, const ModelSpec& spec, int n) {
  if (n <= 0) throw std::domain_error("spectrum grid size must be positive");
  SpectrumGrid grid;
  grid.omegas.resize(n);
  grid.values.resize(n);
  for (int k = 0; k < n; ++k) {
    grid.omegas[k] = std::numbers::pi * (k + 1.0) / n;
    grid.values[k] = spectral_density(grid.omegas[k], theta, spec);
  }
  return grid;
}

}  // namespace dlr
