// Simulation of the error processes and the periodogram-ratio experiment used
// to probe low-frequency fit of candidate spectral models.

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "dlr/model.hpp"
#include "dlr/stats.hpp"
#include "dlr/whittle.hpp"

namespace dlr {

struct SimConfig {
  int T = 0;              // output length
  int burn = -1;          // -1: 10 * max(p, s*P, 100)
  int trunc_L = -1;       // fractional filter truncation; -1: family default
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

// Coefficients w_0..w_L of (1 - e^{-lambda} B)^d, via
//   w_0 = 1,   w_j = w_{j-1} * ((j - 1 - d) / j) * e^{-lambda}.
// Integration (the inverse operator) uses d -> -d.
std::vector<double> tempered_frac_weights(double d, double lambda, int L);

// Draws a length-T realisation of the error process by filtering Gaussian
// noise: MA polynomial, truncated fractional integration (FFT convolution for
// long filters), AR recursion, then integer/seasonal integration.  A burn-in
// prefix absorbs the filter start-up.  Throws std::domain_error for
// non-stationary AR blocks.
Eigen::VectorXd simulate_error_process(const ModelSpec& spec, const ParamVector& theta,
                                       const SimConfig& cfg);

// Exact generator used to cross-check the filtering route: Cholesky factor of
// the Toeplitz autocovariance matrix applied to white noise.  Limited to
// T <= 4096 and stationary models (d_int = D = 0).
Eigen::VectorXd simulate_error_cholesky(const ModelSpec& spec, const ParamVector& theta, int T,
                                        std::mt19937_64& rng);

// Exact stationary draws at O(N log N) via circulant embedding of the
// autocovariance: the embedding size doubles until the circulant eigenvalues
// are nonnegative, then each draw costs one FFT.  Unlike the truncated
// filtering route this is faithful at the lowest frequencies even for
// fractional orders close to 1/2, where the moving-average weights decay too
// slowly for any practical truncation.  Stationary models only.
class CirculantErrorSampler {
 public:
  CirculantErrorSampler(const ModelSpec& spec, const ParamVector& theta, int T);
  Eigen::VectorXd draw(std::mt19937_64& rng) const;
  int length() const { return T_; }
  std::size_t embedding_size() const { return scale_.size(); }

 private:
  int T_ = 0;
  std::vector<double> scale_;  // sqrt(eigenvalue / N) per circulant frequency
};

// A complete regression dataset: each regressor column is an independent
// realisation of the x-process, the response adds the error process on top of
// the linear predictor.
struct DlrSimResult {
  std::vector<std::vector<double>> X;  // m columns of length T
  std::vector<double> y;
  std::vector<double> eta;             // error realisation
};

DlrSimResult simulate_dlr(const ModelSpec& error_spec, const ParamVector& error_params,
                          const ModelSpec& x_spec, const ParamVector& x_params, int T,
                          std::uint64_t seed);

// Posterior mean (= mode) of beta under the Whittle likelihood with the error
// parameters held fixed and the N(0,100) prior on each coefficient; available
// in closed form because the pseudo-data periodogram is quadratic in beta.
Eigen::VectorXd whittle_beta_posterior_mean(const DftCache& cache, const ParamVector& theta,
                                            const ModelSpec& spec, int k_cut = 0);

struct QqExperimentConfig {
  ModelSpec error_spec;       // hypothesised (and simulating) error model
  ParamVector error_params;   // fixed parameter point, beta holds the true coefficients
  ModelSpec x_spec;           // regressor-generating process
  ParamVector x_params;
  int T = 0;
  int n_replications = 0;
  int n_freqs_report = 8;     // lowest Fourier frequencies to track
  bool estimate_beta = true;  // false: evaluate ratios at the true coefficients
  std::uint64_t seed = 0;
};

// Holds per-replication periodogram ratios I_Z(w_k)/f(w_k) at the tracked
// frequencies.  When the spectral model is correct the ratios at each fixed
// frequency are asymptotically standard exponential, which the per-frequency
// KS tests quantify.
struct QqExperimentResult {
  std::vector<double> omegas;
  Eigen::MatrixXd ratios;        // n_replications x n_freqs_report
  std::vector<KsResult> ks;      // one test per tracked frequency
  std::vector<double> beta_hat;  // first regression coefficient per replication
};

QqExperimentResult periodogram_ratio_experiment(const QqExperimentConfig& cfg);

}  // namespace dlr
