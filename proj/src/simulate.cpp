#include "dlr/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dlr/fft.hpp"
#include "dlr/sampler.hpp"
#include "dlr/spectrum.hpp"

namespace dlr {

namespace {

// (1 - sum a_i z^i) * (1 - sum b_j z^{s j}) expanded to full coefficients,
// index 0 holding 1.  `negate` flips the sign convention so the same helper
// expands MA polynomials 1 + sum psi z^j.
std::vector<double> expand_poly(const std::vector<double>& a, const std::vector<double>& b, int s,
                                bool negate) {
  const double sgn = negate ? 1.0 : -1.0;
  std::vector<double> pa(a.size() + 1, 0.0);
  pa[0] = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i) pa[i + 1] = sgn * a[i];
  std::vector<double> pb(b.size() * s + 1, 0.0);
  pb[0] = 1.0;
  for (std::size_t j = 0; j < b.size(); ++j) pb[(j + 1) * s] = sgn * b[j];
  std::vector<double> out(pa.size() + pb.size() - 1, 0.0);
  for (std::size_t i = 0; i < pa.size(); ++i)
    for (std::size_t j = 0; j < pb.size(); ++j) out[i + j] += pa[i] * pb[j];
  return out;
}

void require_stationary(const ParamVector& theta) {
  ar_to_pacf(theta.phi);       // throws when some root is inside the unit circle
  ar_to_pacf(theta.phi_star);
}

int default_trunc(const ModelSpec& spec, const ParamVector& theta, int T) {
  const int cap = std::max(5000, 2 * T);
  if (spec.family == Family::arfima) return cap;
  // ARTFIMA weights decay geometrically; stop once they are negligible.
  double w = 1.0;
  const double rate = std::exp(-theta.lambda);
  for (int j = 1; j <= cap; ++j) {
    w *= ((j - 1.0 + theta.d_frac) / j) * rate;
    if (std::abs(w) < 1e-12) return j;
  }
  return cap;
}

}  // namespace

std::vector<double> tempered_frac_weights(double d, double lambda, int L) {
  if (L < 0) throw std::domain_error("tempered_frac_weights: negative length");
  std::vector<double> w(L + 1);
  w[0] = 1.0;
  const double rate = std::exp(-lambda);
  for (int j = 1; j <= L; ++j) w[j] = w[j - 1] * ((j - 1.0 - d) / j) * rate;
  return w;
}

Eigen::VectorXd simulate_error_process(const ModelSpec& spec, const ParamVector& theta,
                                       const SimConfig& cfg) {
  spec.validate();
  require_stationary(theta);
  if (cfg.T <= 0) throw std::domain_error("simulate_error_process: T must be positive");
  if (!(theta.sigma2_eps > 0.0))
    throw std::domain_error("simulate_error_process: sigma2_eps must be positive");

  const int burn = cfg.burn >= 0 ? cfg.burn : 10 * std::max({spec.p, spec.s * spec.P, 100});
  const int n = cfg.T + burn;
  auto rng = make_rng(cfg.seed, cfg.stream);
  std::normal_distribution<double> normal(0.0, std::sqrt(theta.sigma2_eps));

  std::vector<double> z(n);
  for (int t = 0; t < n; ++t) z[t] = normal(rng);

  // MA stage: z <- psi(B) psi*(B^s) z
  if (spec.q > 0 || spec.Q > 0) {
    const auto ma = expand_poly(theta.psi, theta.psi_star, std::max(spec.s, 1), true);
    std::vector<double> out(n, 0.0);
    const int len = static_cast<int>(ma.size());
    for (int t = 0; t < n; ++t) {
      double acc = 0.0;
      for (int i = 0; i < len && i <= t; ++i) acc += ma[i] * z[t - i];
      out[t] = acc;
    }
    z.swap(out);
  }

  // Fractional integration: z <- (1 - e^{-lambda} B)^{-d} z, truncated.
  if (spec.has_frac() && theta.d_frac != 0.0) {
    const double lambda = spec.has_lambda() ? theta.lambda : 0.0;
    const int L = cfg.trunc_L > 0 ? cfg.trunc_L : default_trunc(spec, theta, cfg.T);
    const auto w = tempered_frac_weights(-theta.d_frac, lambda, L);
    if (L > 256) {
      z = fft::convolve(z, w, n);
    } else {
      std::vector<double> out(n, 0.0);
      for (int t = 0; t < n; ++t) {
        double acc = 0.0;
        for (int i = 0; i <= std::min(L, t); ++i) acc += w[i] * z[t - i];
        out[t] = acc;
      }
      z.swap(out);
    }
  }

  // AR recursion: phi(B) phi*(B^s) out = z with zero start-up, flushed by burn-in.
  if (spec.p > 0 || spec.P > 0) {
    const auto ar = expand_poly(theta.phi, theta.phi_star, std::max(spec.s, 1), false);
    const int len = static_cast<int>(ar.size());
    for (int t = 0; t < n; ++t) {
      double acc = z[t];
      for (int i = 1; i < len && i <= t; ++i) acc -= ar[i] * z[t - i];
      z[t] = acc;
    }
  }

  // Integer and seasonal integration.
  for (int rep = 0; rep < spec.d_int; ++rep)
    for (int t = 1; t < n; ++t) z[t] += z[t - 1];
  for (int rep = 0; rep < spec.D; ++rep)
    for (int t = spec.s; t < n; ++t) z[t] += z[t - spec.s];

  Eigen::VectorXd out(cfg.T);
  for (int t = 0; t < cfg.T; ++t) out[t] = z[burn + t];
  return out;
}

Eigen::VectorXd simulate_error_cholesky(const ModelSpec& spec, const ParamVector& theta, int T,
                                        std::mt19937_64& rng) {
  if (T <= 0 || T > 4096)
    throw std::domain_error("simulate_error_cholesky: T must lie in [1, 4096]");
  if (spec.d_int != 0 || spec.D != 0)
    throw std::domain_error("simulate_error_cholesky: requires a stationary model");
  const auto gamma = autocovariance(theta, spec, T - 1);
  Eigen::MatrixXd cov(T, T);
  for (int i = 0; i < T; ++i)
    for (int j = 0; j < T; ++j) cov(i, j) = gamma[std::abs(i - j)];
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    cov.diagonal().array() += 1e-10 * gamma[0];
    llt.compute(cov);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("simulate_error_cholesky: covariance not positive definite");
  }
  return Eigen::MatrixXd(llt.matrixL()) * draw_std_normal(rng, T);
}

CirculantErrorSampler::CirculantErrorSampler(const ModelSpec& spec, const ParamVector& theta,
                                             int T)
    : T_(T) {
  if (T < 2) throw std::domain_error("CirculantErrorSampler: T must be at least 2");
  if (spec.d_int != 0 || spec.D != 0)
    throw std::domain_error("CirculantErrorSampler: requires a stationary model");
  std::size_t N = std::max<std::size_t>(16, fft::next_pow2(2 * static_cast<std::size_t>(T - 1)));
  constexpr std::size_t N_max = std::size_t{1} << 23;
  for (;; N *= 2) {
    const int half = static_cast<int>(N / 2);
    const auto gamma = autocovariance(theta, spec, half);
    std::vector<std::complex<double>> c(N, 0.0);
    for (int j = 0; j <= half; ++j) c[j] = gamma[j];
    for (int j = 1; j < half; ++j) c[N - j] = gamma[j];
    const auto lam = fft::forward(c);
    double max_l = 0.0, min_l = 0.0;
    for (const auto& l : lam) {
      max_l = std::max(max_l, l.real());
      min_l = std::min(min_l, l.real());
    }
    if (min_l >= -1e-9 * max_l) {
      scale_.resize(N);
      for (std::size_t k = 0; k < N; ++k)
        scale_[k] = std::sqrt(std::max(0.0, lam[k].real()) / static_cast<double>(N));
      return;
    }
    if (2 * N > N_max)
      throw std::runtime_error("CirculantErrorSampler: embedding is not nonnegative definite");
  }
}

Eigen::VectorXd CirculantErrorSampler::draw(std::mt19937_64& rng) const {
  std::normal_distribution<double> norm(0.0, 1.0);
  const std::size_t N = scale_.size(), half = N / 2;
  std::vector<std::complex<double>> e(N);
  e[0] = scale_[0] * norm(rng);
  for (std::size_t k = 1; k < half; ++k) {
    const double u = norm(rng);
    const double v = norm(rng);
    e[k] = scale_[k] * M_SQRT1_2 * std::complex<double>(u, v);
    e[N - k] = std::conj(e[k]);
  }
  e[half] = scale_[half] * norm(rng);
  const auto x = fft::inverse_unscaled(e);
  Eigen::VectorXd out(T_);
  for (int t = 0; t < T_; ++t) out[t] = x[t].real();
  return out;
}

DlrSimResult simulate_dlr(const ModelSpec& error_spec, const ParamVector& error_params,
                          const ModelSpec& x_spec, const ParamVector& x_params, int T,
                          std::uint64_t seed) {
  const int m = error_spec.m;
  if (static_cast<int>(error_params.beta.size()) != m)
    throw std::invalid_argument("simulate_dlr: beta length does not match regressor count");
  DlrSimResult out;
  out.X.resize(m);
  for (int j = 0; j < m; ++j) {
    SimConfig cfg{T, -1, -1, seed, 1000 + static_cast<std::uint64_t>(j)};
    const Eigen::VectorXd col = simulate_error_process(x_spec, x_params, cfg);
    out.X[j].assign(col.data(), col.data() + T);
  }
  SimConfig cfg{T, -1, -1, seed, 2000};
  const Eigen::VectorXd eta = simulate_error_process(error_spec, error_params, cfg);
  out.eta.assign(eta.data(), eta.data() + T);
  out.y.resize(T);
  for (int t = 0; t < T; ++t) {
    double mean = 0.0;
    for (int j = 0; j < m; ++j) mean += error_params.beta[j] * out.X[j][t];
    out.y[t] = mean + out.eta[t];
  }
  return out;
}

Eigen::VectorXd whittle_beta_posterior_mean(const DftCache& cache, const ParamVector& theta,
                                            const ModelSpec& spec, int k_cut) {
  const int m = cache.m();
  const int K = cache.K();
  if (m == 0) return Eigen::VectorXd();
  if (k_cut < 0 || k_cut >= K)
    throw std::domain_error("whittle_beta_posterior_mean: k_cut out of range");
  Eigen::VectorXd a = Eigen::VectorXd::Zero(m);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m, m);
  for (int k = k_cut; k < K; ++k) {
    const double f = spectral_density(cache.omegas[k], theta, spec);
    for (int i = 0; i < m; ++i) {
      a[i] += std::real(std::conj(cache.J_x[i][k]) * cache.J_y[k]) / f;
      for (int j = i; j < m; ++j) {
        const double v = std::real(std::conj(cache.J_x[i][k]) * cache.J_x[j][k]) / f;
        B(i, j) += v;
        if (j != i) B(j, i) += v;
      }
    }
  }
  // Gradient of the Whittle log-likelihood plus the N(0,100) prior vanishes at
  // (B + pi T / 100 I) beta = a.
  B.diagonal().array() += M_PI * cache.T / 100.0;
  return B.ldlt().solve(a);
}

QqExperimentResult periodogram_ratio_experiment(const QqExperimentConfig& cfg) {
  if (cfg.T < 8) throw std::domain_error("periodogram_ratio_experiment: T too small");
  if (cfg.n_replications <= 0)
    throw std::domain_error("periodogram_ratio_experiment: need at least one replication");

  // One fixed regressor design across replications.
  const int m = cfg.error_spec.m;
  std::vector<std::vector<double>> X(m);
  for (int j = 0; j < m; ++j) {
    SimConfig xc{cfg.T, -1, -1, cfg.seed, 1000 + static_cast<std::uint64_t>(j)};
    const Eigen::VectorXd col = simulate_error_process(cfg.x_spec, cfg.x_params, xc);
    X[j].assign(col.data(), col.data() + cfg.T);
  }

  QqExperimentResult out;
  std::vector<double> y(cfg.T);
  const int R = cfg.n_replications;
  int n_track = cfg.n_freqs_report;
  // Error draws use the exact circulant sampler: the experiment measures
  // low-frequency calibration, exactly where the truncated filtering route is
  // biased for fractional orders near 1/2.
  const CirculantErrorSampler sampler(cfg.error_spec, cfg.error_params, cfg.T);
  for (int r = 0; r < R; ++r) {
    auto rng = make_rng(cfg.seed, 2000 + static_cast<std::uint64_t>(r));
    const Eigen::VectorXd eta = sampler.draw(rng);
    for (int t = 0; t < cfg.T; ++t) {
      double mean = 0.0;
      for (int j = 0; j < m; ++j) mean += cfg.error_params.beta[j] * X[j][t];
      y[t] = mean + eta[t];
    }
    const DftCache cache = precompute_dft(y, X);
    if (r == 0) {
      n_track = std::min(n_track, cache.K());
      out.omegas.assign(cache.omegas.begin(), cache.omegas.begin() + n_track);
      out.ratios.resize(R, n_track);
      out.beta_hat.reserve(R);
    }
    Eigen::VectorXd beta_hat;
    if (cfg.estimate_beta) {
      beta_hat = whittle_beta_posterior_mean(cache, cfg.error_params, cfg.error_spec);
    } else {
      beta_hat = Eigen::Map<const Eigen::VectorXd>(cfg.error_params.beta.data(), m);
    }
    out.beta_hat.push_back(m > 0 ? beta_hat[0] : 0.0);
    const std::vector<double> beta(beta_hat.data(), beta_hat.data() + beta_hat.size());
    const auto J_z = pseudo_dft(cache, beta);
    const auto I_z = periodogram(J_z, cfg.T);
    for (int k = 0; k < n_track; ++k) {
      const double f = spectral_density(out.omegas[k], cfg.error_params, cfg.error_spec);
      out.ratios(r, k) = I_z[k] / f;
    }
  }

  out.ks.reserve(n_track);
  std::vector<double> col(R);
  for (int k = 0; k < n_track; ++k) {
    for (int r = 0; r < R; ++r) col[r] = out.ratios(r, k);
    out.ks.push_back(ks_test_exponential(col));
  }
  return out;
}

}  // namespace dlr
