#include "dlr/fit.hpp"

#include <cmath>
#include <stdexcept>

#include "dlr/time_domain.hpp"

namespace dlr {

LogDensityFn make_log_posterior(const DftCache& cache, const ModelSpec& spec, int k_cut) {
  if (cache.m() != spec.m)
    throw std::invalid_argument("make_log_posterior: regressor count mismatch");
  return [&cache, spec, k_cut](const Eigen::VectorXd& v) {
    const UnconstrainedParams u = unpack(v, spec);
    const ParamVector theta = to_natural(u, spec);
    return log_prior(u, spec) + whittle_loglik(cache, theta, spec, k_cut);
  };
}

std::string likelihood_name(LikelihoodKind kind) {
  switch (kind) {
    case LikelihoodKind::whittle: return "whittle";
    case LikelihoodKind::gaussian: return "gaussian";
    case LikelihoodKind::kalman: return "kalman";
  }
  throw std::logic_error("likelihood_name: unknown kind");
}

LogDensityFn make_log_posterior_time_domain(std::span<const double> y,
                                            const std::vector<std::vector<double>>& X,
                                            const ModelSpec& spec, LikelihoodKind kind) {
  if (kind == LikelihoodKind::whittle)
    throw std::invalid_argument("make_log_posterior_time_domain: use make_log_posterior");
  if (static_cast<int>(X.size()) != spec.m)
    throw std::invalid_argument("make_log_posterior_time_domain: regressor count mismatch");
  const std::vector<double> y_copy(y.begin(), y.end());
  const std::vector<std::vector<double>> x_copy = X;
  return [y_copy, x_copy, spec, kind](const Eigen::VectorXd& v) {
    const UnconstrainedParams u = unpack(v, spec);
    const ParamVector theta = to_natural(u, spec);
    const int T = static_cast<int>(y_copy.size());
    std::vector<double> e(T);
    double mean = 0.0;
    for (int t = 0; t < T; ++t) {
      double r = y_copy[t];
      for (std::size_t j = 0; j < x_copy.size(); ++j) r -= theta.beta[j] * x_copy[j][t];
      e[t] = r;
      mean += r;
    }
    mean /= T;
    for (double& r : e) r -= mean;
    const double ll = kind == LikelihoodKind::gaussian ? gaussian_loglik(e, theta, spec)
                                                       : kalman_loglik(e, theta, spec);
    return log_prior(u, spec) + ll;
  };
}

PriorDrawFn make_prior_draw(const ModelSpec& spec) {
  return [spec](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    UnconstrainedParams u;
    auto draw_pacf_block = [&](int n, std::vector<double>& raw) {
      raw.resize(n);
      for (int i = 0; i < n; ++i) raw[i] = std::atanh(unif(rng));
    };
    draw_pacf_block(spec.p, u.phi_raw);
    draw_pacf_block(spec.q, u.psi_raw);
    draw_pacf_block(spec.P, u.phi_star_raw);
    draw_pacf_block(spec.Q, u.psi_star_raw);
    if (spec.has_frac()) u.d_raw = normal(rng);
    if (spec.has_lambda()) u.log_lambda = 10.0 * normal(rng);
    u.log_sigma2 = 10.0 * normal(rng);
    u.beta.resize(spec.m);
    for (int j = 0; j < spec.m; ++j) u.beta[j] = 10.0 * normal(rng);
    return pack(u, spec);
  };
}

FitResult fit_model(const DftCache& cache, const ModelSpec& spec, const FitConfig& cfg) {
  spec.validate();
  const LogDensityFn log_post = make_log_posterior(cache, spec, cfg.k_cut);

  FitResult out;
  Eigen::VectorXd init;
  std::optional<Eigen::MatrixXd> init_cov = cfg.init_cov;
  if (cfg.init) {
    init = *cfg.init;
  } else {
    out.map = find_map(log_post, spec.dim(), cfg.map_restarts, make_prior_draw(spec),
                       cfg.sampler.seed);
    out.map_searched = true;
    init = out.map.point;
    if (!init_cov) init_cov = out.map.cov_seed;
  }

  out.chain = run_adaptive_mh(log_post, init, cfg.sampler, init_cov);

  const int n_kept = out.chain.n_kept();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(spec.dim());
  for (int i = 0; i < n_kept; ++i) {
    const ParamVector theta = to_natural(unpack(out.chain.draws.row(i).transpose(), spec), spec);
    acc += pack_natural(theta, spec);
  }
  out.posterior_mean_natural = acc / std::max(1, n_kept);
  return out;
}

}  // namespace dlr
