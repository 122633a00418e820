// Forecasting from the posterior and rolling-origin forecast evaluation.
//
// Horizon-h forecasts condition on the last `window_W` observations through
// the exact Gaussian conditional distribution of the error process, computed
// with the Durbin-Levinson / innovations recursions from the autocovariance
// sequence.  Posterior uncertainty enters by mixing over thinned draws.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dlr/model.hpp"
#include "dlr/sampler.hpp"
#include "dlr/whittle.hpp"

namespace dlr {

struct ConditionalForecast {
  std::vector<double> mean;  // E[e_{n+h} | e_1..e_n],  h = 1..h_max
  std::vector<double> mse;   // Var[e_{n+h} | e_1..e_n]
};

// `history` holds the demeaned error series e_1..e_n, `gamma` the
// autocovariances gamma(0)..gamma(n + h_max - 1) (longer is fine).  Runs the
// Durbin-Levinson recursion to order n + h_max - 1; means come from iterating
// the one-step predictors forward, variances from the innovations expansion
//   MSE(h) = sum_{j=n+1}^{n+h} c_j^2 v_{j-1},
//   c_j = [gamma(n+h-j) - sum_i phi_{j-1,i} gamma(n+h-j+i)] / v_{j-1}.
// Throws std::domain_error on short inputs, std::runtime_error if an
// innovation variance is not positive.
ConditionalForecast conditional_forecast(std::span<const double> history,
                                         std::span<const double> gamma, int h_max);

struct ForecastConfig {
  int h_max = 1;
  int n_draws = 900;    // posterior mixture size M (thinned from the chain)
  int window_W = -1;    // conditioning window; -1: min(n, 2048)
  std::vector<double> quantile_levels = {0.05, 0.5, 0.95};
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

struct PredictiveResult {
  Eigen::MatrixXd component_mean;  // M x h_max, per-draw predictive mean
  Eigen::MatrixXd component_var;   // M x h_max, per-draw predictive variance
  Eigen::MatrixXd draws;           // M x h_max, one normal draw per component
  std::vector<double> point;       // mean of draws, h = 1..h_max
  Eigen::MatrixXd quantiles;       // n_levels x h_max, empirical over draws
  int n_components = 0;            // M actually used
  int n_failed_draws = 0;          // posterior draws skipped (degenerate covariance)
};

// y, X: training data (X as m columns); X_future: m columns of length h_max
// holding the future regressor values.  `draws` are kept unconstrained
// sampler rows; a uniform stride thins them to cfg.n_draws.
PredictiveResult posterior_predictive(std::span<const double> y,
                                      const std::vector<std::vector<double>>& X,
                                      const std::vector<std::vector<double>>& X_future,
                                      const ModelSpec& spec, const Eigen::MatrixXd& draws,
                                      const ForecastConfig& cfg);

// log of the predictive mixture density (1/M) sum_j N(y_obs; mean_j, var_j)
// at horizon index h (0-based), via log-sum-exp.
double log_mixture_density(const PredictiveResult& pred, int h_index, double y_obs);

// Sample-based continuous ranked probability score,
//   CRPS = mean_i |x_i - y| - (1/2) mean_{i,j} |x_i - x_j|,
// computed in O(M log M) after sorting.
double crps_sample(std::span<const double> sample, double y_obs);

struct DicResult {
  double dic = 0.0;
  double d_bar = 0.0;       // posterior mean deviance -2 log L
  double p_d = 0.0;         // effective number of parameters
  int n_draws_used = 0;
  bool theta_star_valid = false;  // false when the natural-space posterior mean
                                  // is outside the stationary region
};

// Deviance information criterion under the Whittle likelihood, with the
// plug-in point theta* taken as the natural-space posterior mean.
DicResult dic(const DftCache& cache, const ModelSpec& spec, const ChainResult& chain,
              int k_cut = 0);

struct CvConfig {
  int train_T = 0;
  int k = 0;        // number of rolling origins; data length must be train_T + k
  int h_max = 1;
  int window_W = -1;
  int n_draws = 900;
  int k_cut = 0;
  bool refit_each_window = true;  // false: fit on the first window, reuse draws
  int map_restarts = 4;           // start points for the first-window mode search
  SamplerSettings sampler;        // per-window chain settings
};

struct CvResult {
  std::vector<double> rmse;   // per h = 1..h_max
  std::vector<double> lpds;   // negated mean log predictive density (lower is better)
  std::vector<double> crps;
  std::vector<int> n_points;  // forecasts scored per horizon
  int n_skipped_windows = 0;
  int n_dropped_densities = 0;  // realised values with zero predictive density
  std::vector<std::string> warnings;
};

// Rolling-origin evaluation: window i trains on y[i .. i+train_T) and scores
// horizons h = 1..min(h_max, k-i) against the realised continuation.  Refits
// are warm-started from the previous window's chain state.
CvResult rolling_cv(std::span<const double> y, const std::vector<std::vector<double>>& X,
                    const ModelSpec& spec, const CvConfig& cfg);

}  // namespace dlr
