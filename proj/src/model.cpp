#include "dlr/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dlr {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // log(2*pi)

double log_normal_density(double x, double mean, double variance) {
  const double r = x - mean;
  return -0.5 * (kLog2Pi + std::log(variance) + r * r / variance);
}

std::vector<double> negate(std::vector<double> v) {
  for (double& x : v) x = -x;
  return v;
}

std::vector<double> tanh_all(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::tanh(v[i]);
  return out;
}

std::vector<double> atanh_all(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::atanh(v[i]);
  return out;
}

// Uniform(-1,1) prior on tanh(x) pulled back to x: log(1/2) + log(1 - tanh^2 x).
double log_pacf_block_prior(const std::vector<double>& raw) {
  double lp = 0.0;
  for (double x : raw) {
    const double t = std::tanh(x);
    lp += std::log(0.5) + std::log1p(-t * t);
  }
  return lp;
}

}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::arma: return "arma";
    case Family::arfima: return "arfima";
    case Family::artfima: return "artfima";
  }
  throw std::logic_error("unreachable family");
}

Family family_from_name(const std::string& name) {
  if (name == "arma") return Family::arma;
  if (name == "arfima") return Family::arfima;
  if (name == "artfima") return Family::artfima;
  throw std::domain_error("unknown error family '" + name + "' (expected arma, arfima, or artfima)");
}

void ModelSpec::validate() const {
  if (p < 0 || q < 0 || P < 0 || Q < 0 || d_int < 0 || D < 0 || m < 0)
    throw std::domain_error("model orders must be non-negative");
  const bool seasonal = P > 0 || Q > 0 || D > 0;
  if (seasonal && s < 2)
    throw std::domain_error("seasonal period s must be >= 2 when seasonal orders are nonzero");
  if (!seasonal && s != 0 && s < 2)
    throw std::domain_error("seasonal period must be 0 (absent) or >= 2");
}

std::vector<double> pacf_to_ar(const std::vector<double>& pacf) {
  for (double r : pacf)
    if (!(std::abs(r) < 1.0))
      throw std::domain_error("partial autocorrelation out of (-1,1)");
  std::vector<double> a(pacf.size(), 0.0);
  std::vector<double> prev(pacf.size(), 0.0);
  for (std::size_t k = 0; k < pacf.size(); ++k) {
    prev = a;
    a[k] = pacf[k];
    for (std::size_t i = 0; i < k; ++i) a[i] = prev[i] - pacf[k] * prev[k - 1 - i];
  }
  return a;
}

std::vector<double> ar_to_pacf(const std::vector<double>& phi) {
  std::vector<double> pacf(phi.size(), 0.0);
  std::vector<double> a = phi;
  for (std::size_t k = phi.size(); k-- > 0;) {
    const double r = a[k];
    if (!(std::abs(r) < 1.0))
      throw std::domain_error("AR polynomial is not stationary (reflection coefficient outside (-1,1))");
    pacf[k] = r;
    std::vector<double> prev(k, 0.0);
    const double denom = 1.0 - r * r;
    for (std::size_t i = 0; i < k; ++i) prev[i] = (a[i] + r * a[k - 1 - i]) / denom;
    a = std::move(prev);
  }
  return pacf;
}

std::vector<double> ma_pacf_to_coef(const std::vector<double>& pacf) {
  return negate(pacf_to_ar(negate(pacf)));
}

std::vector<double> ma_coef_to_pacf(const std::vector<double>& psi) {
  return negate(ar_to_pacf(negate(psi)));
}

ParamVector to_natural(const UnconstrainedParams& u, const ModelSpec& spec) {
  ParamVector theta;
  theta.phi = pacf_to_ar(tanh_all(u.phi_raw));
  theta.psi = ma_pacf_to_coef(tanh_all(u.psi_raw));
  theta.phi_star = pacf_to_ar(tanh_all(u.phi_star_raw));
  theta.psi_star = ma_pacf_to_coef(tanh_all(u.psi_star_raw));
  switch (spec.family) {
    case Family::arma: theta.d_frac = 0.0; break;
    case Family::arfima: {
      // tanh saturates to +-1 in double for |d_raw| >~ 20; clamp so the
      // strict |d| < 1/2 stationarity invariant survives the round trip.
      constexpr double cap = 0.5 * (1.0 - 1e-15);
      theta.d_frac = std::clamp(0.5 * std::tanh(u.d_raw), -cap, cap);
      break;
    }
    case Family::artfima: theta.d_frac = u.d_raw; break;
  }
  theta.lambda = spec.has_lambda() ? std::exp(u.log_lambda) : 0.0;
  theta.sigma2_eps = std::exp(u.log_sigma2);
  theta.beta = u.beta;
  return theta;
}

UnconstrainedParams to_unconstrained(const ParamVector& theta, const ModelSpec& spec) {
  UnconstrainedParams u;
  u.phi_raw = atanh_all(ar_to_pacf(theta.phi));
  u.psi_raw = atanh_all(ma_coef_to_pacf(theta.psi));
  u.phi_star_raw = atanh_all(ar_to_pacf(theta.phi_star));
  u.psi_star_raw = atanh_all(ma_coef_to_pacf(theta.psi_star));
  switch (spec.family) {
    case Family::arma:
      u.d_raw = 0.0;
      break;
    case Family::arfima:
      if (!(std::abs(theta.d_frac) < 0.5))
        throw std::domain_error("ARFIMA requires |d| < 0.5");
      u.d_raw = std::atanh(2.0 * theta.d_frac);
      break;
    case Family::artfima:
      u.d_raw = theta.d_frac;
      break;
  }
  if (spec.has_lambda()) {
    if (!(theta.lambda > 0.0)) throw std::domain_error("ARTFIMA requires lambda > 0");
    u.log_lambda = std::log(theta.lambda);
  }
  if (!(theta.sigma2_eps > 0.0)) throw std::domain_error("sigma2_eps must be positive");
  u.log_sigma2 = std::log(theta.sigma2_eps);
  u.beta = theta.beta;
  return u;
}

double log_prior(const UnconstrainedParams& u, const ModelSpec& spec) {
  double lp = 0.0;
  lp += log_pacf_block_prior(u.phi_raw);
  lp += log_pacf_block_prior(u.psi_raw);
  lp += log_pacf_block_prior(u.phi_star_raw);
  lp += log_pacf_block_prior(u.psi_star_raw);
  if (spec.has_frac()) lp += log_normal_density(u.d_raw, 0.0, 1.0);
  if (spec.has_lambda()) lp += log_normal_density(u.log_lambda, 0.0, 100.0);
  lp += log_normal_density(u.log_sigma2, 0.0, 100.0);
  for (double b : u.beta) lp += log_normal_density(b, 0.0, 100.0);
  return lp;
}

Eigen::VectorXd pack(const UnconstrainedParams& u, const ModelSpec& spec) {
  Eigen::VectorXd v(spec.dim());
  int i = 0;
  for (double x : u.phi_raw) v[i++] = x;
  for (double x : u.psi_raw) v[i++] = x;
  for (double x : u.phi_star_raw) v[i++] = x;
  for (double x : u.psi_star_raw) v[i++] = x;
  if (spec.has_frac()) v[i++] = u.d_raw;
  if (spec.has_lambda()) v[i++] = u.log_lambda;
  v[i++] = u.log_sigma2;
  for (double x : u.beta) v[i++] = x;
  if (i != spec.dim()) throw std::invalid_argument("parameter block sizes do not match the model spec");
  return v;
}

UnconstrainedParams unpack(const Eigen::VectorXd& v, const ModelSpec& spec) {
  if (v.size() != spec.dim())
    throw std::invalid_argument("parameter vector length does not match the model spec");
  UnconstrainedParams u;
  int i = 0;
  u.phi_raw.assign(v.data() + i, v.data() + i + spec.p); i += spec.p;
  u.psi_raw.assign(v.data() + i, v.data() + i + spec.q); i += spec.q;
  u.phi_star_raw.assign(v.data() + i, v.data() + i + spec.P); i += spec.P;
  u.psi_star_raw.assign(v.data() + i, v.data() + i + spec.Q); i += spec.Q;
  if (spec.has_frac()) u.d_raw = v[i++];
  if (spec.has_lambda()) u.log_lambda = v[i++];
  u.log_sigma2 = v[i++];
  u.beta.assign(v.data() + i, v.data() + i + spec.m);
  return u;
}

Eigen::VectorXd pack_natural(const ParamVector& theta, const ModelSpec& spec) {
  Eigen::VectorXd v(spec.dim());
  int i = 0;
  for (double x : theta.phi) v[i++] = x;
  for (double x : theta.psi) v[i++] = x;
  for (double x : theta.phi_star) v[i++] = x;
  for (double x : theta.psi_star) v[i++] = x;
  if (spec.has_frac()) v[i++] = theta.d_frac;
  if (spec.has_lambda()) v[i++] = theta.lambda;
  v[i++] = theta.sigma2_eps;
  for (double x : theta.beta) v[i++] = x;
  if (i != spec.dim()) throw std::invalid_argument("parameter block sizes do not match the model spec");
  return v;
}

ParamVector unpack_natural(const Eigen::VectorXd& v, const ModelSpec& spec) {
  if (v.size() != spec.dim())
    throw std::invalid_argument("parameter vector length does not match the model spec");
  ParamVector theta;
  int i = 0;
  theta.phi.assign(v.data() + i, v.data() + i + spec.p); i += spec.p;
  theta.psi.assign(v.data() + i, v.data() + i + spec.q); i += spec.q;
  theta.phi_star.assign(v.data() + i, v.data() + i + spec.P); i += spec.P;
  theta.psi_star.assign(v.data() + i, v.data() + i + spec.Q); i += spec.Q;
  if (spec.has_frac()) theta.d_frac = v[i++];
  if (spec.has_lambda()) theta.lambda = v[i++];
  theta.sigma2_eps = v[i++];
  theta.beta.assign(v.data() + i, v.data() + i + spec.m);
  return theta;
}

std::vector<std::string> natural_names(const ModelSpec& spec) {
  std::vector<std::string> names;
  for (int i = 1; i <= spec.p; ++i) names.push_back("phi_" + std::to_string(i));
  for (int j = 1; j <= spec.q; ++j) names.push_back("psi_" + std::to_string(j));
  for (int i = 1; i <= spec.P; ++i) names.push_back("sphi_" + std::to_string(i));
  for (int j = 1; j <= spec.Q; ++j) names.push_back("spsi_" + std::to_string(j));
  if (spec.has_frac()) names.push_back("d");
  if (spec.has_lambda()) names.push_back("lambda");
  names.push_back("sigma2");
  for (int k = 1; k <= spec.m; ++k) names.push_back("beta_" + std::to_string(k));
  return names;
}

std::vector<double> difference(std::span<const double> series, int d_int, int D, int s) {
  if (d_int < 0 || D < 0) throw std::domain_error("differencing orders must be non-negative");
  if (D > 0 && s < 2) throw std::domain_error("seasonal differencing requires period s >= 2");
  const std::size_t drop = static_cast<std::size_t>(d_int) + static_cast<std::size_t>(D) * static_cast<std::size_t>(s);
  if (series.size() <= drop) throw std::domain_error("series too short for the requested differencing");
  std::vector<double> out(series.begin(), series.end());
  for (int r = 0; r < d_int; ++r) {
    std::vector<double> next(out.size() - 1);
    for (std::size_t t = 1; t < out.size(); ++t) next[t - 1] = out[t] - out[t - 1];
    out = std::move(next);
  }
  for (int r = 0; r < D; ++r) {
    std::vector<double> next(out.size() - s);
    for (std::size_t t = static_cast<std::size_t>(s); t < out.size(); ++t) next[t - s] = out[t] - out[t - s];
    out = std::move(next);
  }
  return out;
}

}  // namespace dlr
