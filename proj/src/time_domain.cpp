#include "dlr/time_domain.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "dlr/spectrum.hpp"

namespace dlr {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

// (1 - sum a B^i)(1 - sum b B^{s j}) expanded into one polynomial written as
// 1 - sum c B^i; used for both the AR and (after sign flips) the MA side.
std::vector<double> expand_seasonal(const std::vector<double>& a, const std::vector<double>& b, int s) {
  if (b.empty()) return a;
  std::vector<double> c(a.size() + static_cast<std::size_t>(s) * b.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i];
  for (std::size_t j = 0; j < b.size(); ++j) {
    const std::size_t base = s * (j + 1) - 1;
    c[base] += b[j];
    for (std::size_t i = 0; i < a.size(); ++i) c[base + 1 + i] -= b[j] * a[i];
  }
  return c;
}

std::vector<double> negate(std::vector<double> v) {
  for (double& x : v) x = -x;
  return v;
}

}  // namespace

double gaussian_loglik(std::span<const double> z, const ParamVector& theta, const ModelSpec& spec) {
  const int T = static_cast<int>(z.size());
  if (T == 0) throw std::domain_error("gaussian_loglik requires a non-empty series");
  const auto gamma = autocovariance(theta, spec, T - 1);

  // Durbin-Levinson: a[] holds the coefficients predicting z_{t+1} from the
  // previous t values, v the running one-step prediction variance.
  double ll = 0.0;
  double v = gamma[0];
  if (!(v > 0.0)) throw std::runtime_error("gaussian_loglik: non-positive variance at lag 0");
  ll += -0.5 * (kLog2Pi + std::log(v) + z[0] * z[0] / v);

  std::vector<double> a, prev;
  a.reserve(T);
  prev.reserve(T);
  for (int t = 1; t < T; ++t) {
    // reflection coefficient for order t
    double acc = gamma[t];
    for (int j = 1; j < t; ++j) acc -= a[j - 1] * gamma[t - j];
    const double k = acc / v;
    prev = a;
    a.resize(t);
    a[t - 1] = k;
    for (int j = 1; j < t; ++j) a[j - 1] = prev[j - 1] - k * prev[t - 1 - j];
    v *= (1.0 - k * k);
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::runtime_error("gaussian_loglik: covariance not positive definite at lag " + std::to_string(t));
    double pred = 0.0;
    for (int j = 1; j <= t; ++j) pred += a[j - 1] * z[t - j];
    const double e = z[t] - pred;
    ll += -0.5 * (kLog2Pi + std::log(v) + e * e / v);
  }
  return ll;
}

StateSpaceModel build_state_space(const ParamVector& theta, const ModelSpec& spec) {
  if (spec.family != Family::arma)
    throw std::domain_error("build_state_space supports the ARMA family only (fractional models have no "
                            "finite-dimensional state space)");
  ar_to_pacf(theta.phi);  // stationarity check
  ar_to_pacf(theta.phi_star);

  const auto phi = expand_seasonal(theta.phi, theta.phi_star, spec.s);
  // psi(z) = 1 + sum psi_j z^j; expand_seasonal works on the 1 - sum form.
  const auto psi = negate(expand_seasonal(negate(theta.psi), negate(theta.psi_star), spec.s));

  const int p = static_cast<int>(phi.size());
  const int q = static_cast<int>(psi.size());
  const int r = std::max(p, q + 1);

  StateSpaceModel ss;
  ss.r = r;
  ss.transition = Eigen::MatrixXd::Zero(r, r);
  for (int i = 0; i < p; ++i) ss.transition(i, 0) = phi[i];
  for (int i = 0; i + 1 < r; ++i) ss.transition(i, i + 1) = 1.0;
  ss.state_loading = Eigen::VectorXd::Zero(r);
  ss.state_loading[0] = 1.0;
  for (int j = 0; j < q; ++j) ss.state_loading[j + 1] = psi[j];
  ss.observation = Eigen::VectorXd::Zero(r);
  ss.observation[0] = 1.0;
  ss.innovation_variance = theta.sigma2_eps;

  // Stationary covariance: P = T P T' + sigma2 R R', solved through
  // (I - T (x) T) vec(P) = vec(sigma2 R R').
  const Eigen::MatrixXd Q = theta.sigma2_eps * ss.state_loading * ss.state_loading.transpose();
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(r * r, r * r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      for (int k = 0; k < r; ++k)
        for (int l = 0; l < r; ++l)
          A(i * r + j, k * r + l) -= ss.transition(i, k) * ss.transition(j, l);
  Eigen::VectorXd vecQ(r * r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) vecQ[i * r + j] = Q(i, j);
  Eigen::VectorXd vecP = A.partialPivLu().solve(vecQ);
  ss.stationary_cov.resize(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) ss.stationary_cov(i, j) = vecP[i * r + j];
  ss.stationary_cov = 0.5 * (ss.stationary_cov + ss.stationary_cov.transpose().eval());
  return ss;
}

double kalman_loglik(std::span<const double> z, const ParamVector& theta, const ModelSpec& spec) {
  const auto ss = build_state_space(theta, spec);
  const int r = ss.r;
  const Eigen::MatrixXd Q = ss.innovation_variance * ss.state_loading * ss.state_loading.transpose();

  Eigen::VectorXd a = Eigen::VectorXd::Zero(r);
  Eigen::MatrixXd P = ss.stationary_cov;
  double ll = 0.0;
  Eigen::VectorXd Ta(r), K(r);
  for (double zt : z) {
    // observation = e_1, so the predictive moments read off the first entry
    const double v = zt - a[0];
    const double F = P(0, 0);
    if (!(F > 0.0) || !std::isfinite(F))
      throw std::runtime_error("kalman_loglik: filter divergence (non-positive prediction variance)");
    ll += -0.5 * (kLog2Pi + std::log(F) + v * v / F);
    Ta.noalias() = ss.transition * a;
    K.noalias() = ss.transition * P.col(0) / F;
    a = Ta + K * v;
    P = ss.transition * P * ss.transition.transpose() + Q - F * K * K.transpose();
    P = 0.5 * (P + P.transpose().eval());
  }
  return ll;
}

}  // namespace dlr
