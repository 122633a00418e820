// Domain types and parameter transformations for dynamic linear regression
// with ARMA / ARFIMA / (seasonal) ARTFIMA error processes.
//
// Naming conventions used throughout the library:
//   phi      AR coefficients, polynomial  phi(z)  = 1 - sum_i phi_i z^i
//   psi      MA coefficients, polynomial  psi(z)  = 1 + sum_j psi_j z^j
//   phi_star / psi_star   seasonal analogues evaluated at z^s
//   d_frac   fractional differencing order
//   lambda   tempering rate of the tempered fractional operator (1 - e^{-lambda} B)^d
//
// Sampling happens in an unconstrained space: AR/MA blocks are parameterised by
// partial autocorrelations in (-1,1) stored through arctanh, variance and
// tempering through logs, and the ARFIMA fractional order through the scaled
// Fisher transform arctanh(2d).

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dlr {

enum class Family { arma, arfima, artfima };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

struct ModelSpec {
  Family family = Family::arma;
  int p = 0;      // non-seasonal AR order
  int q = 0;      // non-seasonal MA order
  int P = 0;      // seasonal AR order
  int Q = 0;      // seasonal MA order
  int s = 0;      // seasonal period, >= 2 whenever P, Q or D is nonzero
  int d_int = 0;  // integer differencing applied to the data before fitting
  int D = 0;      // seasonal integer differencing, lag s
  int m = 0;      // number of regressors

  bool has_frac() const { return family != Family::arma; }
  bool has_lambda() const { return family == Family::artfima; }

  // Number of sampled coordinates: AR/MA blocks + d + lambda + log sigma2 + beta.
  int dim() const {
    return p + q + P + Q + (has_frac() ? 1 : 0) + (has_lambda() ? 1 : 0) + 1 + m;
  }

  // Throws std::domain_error when orders/periods are inconsistent.
  void validate() const;
};

// Natural-space parameters.  Invariants: the AR and seasonal AR polynomials
// have all roots strictly outside the unit circle, the MA polynomials likewise
// (invertibility), sigma2_eps > 0, lambda > 0 for ARTFIMA and |d_frac| < 0.5
// for ARFIMA.
struct ParamVector {
  std::vector<double> phi;
  std::vector<double> psi;
  std::vector<double> phi_star;
  std::vector<double> psi_star;
  double d_frac = 0.0;
  double lambda = 0.0;
  double sigma2_eps = 1.0;
  std::vector<double> beta;
};

// Unconstrained coordinates used by the optimizer and the MCMC sampler.
// phi_raw etc. hold arctanh of the partial autocorrelations; d_raw is the
// identity for ARTFIMA and arctanh(2 d) for ARFIMA.
struct UnconstrainedParams {
  std::vector<double> phi_raw;
  std::vector<double> psi_raw;
  std::vector<double> phi_star_raw;
  std::vector<double> psi_star_raw;
  double d_raw = 0.0;
  double log_lambda = 0.0;
  double log_sigma2 = 0.0;
  std::vector<double> beta;
};

// Durbin-Levinson map from partial autocorrelations in (-1,1)^p to AR
// coefficients of a polynomial with all roots outside the unit circle.
// Throws std::domain_error if any |pacf| >= 1.
std::vector<double> pacf_to_ar(const std::vector<double>& pacf);

// Exact inverse of pacf_to_ar.  Throws std::domain_error when the input
// polynomial is not stationary (some reflection coefficient lands outside
// (-1,1)).
std::vector<double> ar_to_pacf(const std::vector<double>& phi);

// MA block reuses the same reparameterisation; with psi(z) = 1 + sum psi_j z^j
// the invertible coefficients are psi = -pacf_to_ar(-pacf), which keeps the
// q = 1 case as the identity psi_1 = pacf_1.
std::vector<double> ma_pacf_to_coef(const std::vector<double>& pacf);
std::vector<double> ma_coef_to_pacf(const std::vector<double>& psi);

ParamVector to_natural(const UnconstrainedParams& u, const ModelSpec& spec);
UnconstrainedParams to_unconstrained(const ParamVector& theta, const ModelSpec& spec);

// Log prior density over the unconstrained coordinates.  Uniform(-1,1) priors
// on partial autocorrelations enter through the tanh Jacobian; N(0,100) on
// log sigma2, log lambda and each beta_k; N(0,1) on d (ARTFIMA) or on
// arctanh(2d) (ARFIMA).  All Jacobian terms are included so the chain targets
// the stated natural-space priors.
double log_prior(const UnconstrainedParams& u, const ModelSpec& spec);

// Flat-vector packing in the order
//   [phi_raw, psi_raw, phi_star_raw, psi_star_raw, d_raw?, log_lambda?,
//    log_sigma2, beta]
Eigen::VectorXd pack(const UnconstrainedParams& u, const ModelSpec& spec);
UnconstrainedParams unpack(const Eigen::VectorXd& v, const ModelSpec& spec);

// Natural-space flat vector in the order
//   [phi, psi, phi_star, psi_star, d?, lambda?, sigma2, beta]
// used for posterior CSV rows and posterior-mean summaries.
Eigen::VectorXd pack_natural(const ParamVector& theta, const ModelSpec& spec);
ParamVector unpack_natural(const Eigen::VectorXd& v, const ModelSpec& spec);
std::vector<std::string> natural_names(const ModelSpec& spec);

// Applies (1-B)^d_int (1-B^s)^D; the output is shorter by d_int + D*s.
// Throws std::domain_error when the series is too short.
std::vector<double> difference(std::span<const double> series, int d_int, int D, int s);

}  // namespace dlr
