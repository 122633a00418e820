// Exact time-domain Gaussian likelihood (Toeplitz covariance via the
// Durbin-Levinson innovations recursion, O(T^2)) for every family, and a
// Kalman-filter likelihood for the ARMA family.  Both serve as correctness
// and speed baselines for the Whittle likelihood.

#pragma once

#include <span>

#include <Eigen/Dense>

#include "dlr/model.hpp"

namespace dlr {

// log N(z | 0, Gamma) with Gamma_ij = gamma(|i-j|) from autocovariance().
// No matrix is formed; prediction errors come from the Durbin-Levinson
// recursion.  Throws std::runtime_error when a prediction variance is
// non-positive (numerically non-PD covariance), naming the offending lag.
double gaussian_loglik(std::span<const double> z, const ParamVector& theta, const ModelSpec& spec);

// Harvey-form ARMA(p,q) state space with r = max(p, q+1):
//   alpha_t = transition * alpha_{t-1} + state_loading * eps_t
//   z_t     = observation . alpha_t
// Seasonal ARMA polynomials are expanded by multiplication first.  The
// stationary initial covariance solves the discrete Lyapunov equation.
struct StateSpaceModel {
  int r = 0;
  Eigen::MatrixXd transition;
  Eigen::VectorXd state_loading;
  Eigen::VectorXd observation;
  double innovation_variance = 1.0;
  Eigen::MatrixXd stationary_cov;
};

// Throws std::domain_error for non-ARMA families (no finite-dimensional state
// space exists for fractional models).
StateSpaceModel build_state_space(const ParamVector& theta, const ModelSpec& spec);

// Prediction-error decomposition log-likelihood, O(T r^2) after the initial
// Lyapunov solve.  ARMA family only.  Throws std::runtime_error on filter
// divergence.
double kalman_loglik(std::span<const double> z, const ParamVector& theta, const ModelSpec& spec);

}  // namespace dlr
