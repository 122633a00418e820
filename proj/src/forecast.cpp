#include "dlr/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "dlr/fit.hpp"
#include "dlr/spectrum.hpp"

namespace dlr {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<int> thin_indices(int available, int wanted) {
  const int m = std::min(available, wanted);
  std::vector<int> idx(m);
  for (int i = 0; i < m; ++i)
    idx[i] = static_cast<int>(static_cast<long long>(i) * available / m);
  return idx;
}

double empirical_quantile(std::vector<double> sorted, double p) {
  const int n = static_cast<int>(sorted.size());
  if (n == 1) return sorted[0];
  const double pos = p * (n - 1);
  const int lo = std::clamp(static_cast<int>(std::floor(pos)), 0, n - 2);
  const double frac = pos - lo;
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

}  // namespace

ConditionalForecast conditional_forecast(std::span<const double> history,
                                         std::span<const double> gamma, int h_max) {
  const int n = static_cast<int>(history.size());
  if (n < 1) throw std::domain_error("conditional_forecast: empty history");
  if (h_max < 1) throw std::domain_error("conditional_forecast: h_max must be positive");
  const int N = n + h_max - 1;  // highest predictor order needed
  if (static_cast<int>(gamma.size()) < N + 1)
    throw std::domain_error("conditional_forecast: need gamma(0..n+h_max-1)");
  if (!(gamma[0] > 0.0)) throw std::runtime_error("conditional_forecast: gamma(0) must be positive");

  // Durbin-Levinson with rolling coefficient rows; rows of order >= n are kept
  // for the forecast composition and the innovations expansion.
  std::vector<double> v(N + 1);
  v[0] = gamma[0];
  std::vector<double> prev(N, 0.0), cur(N, 0.0);
  std::vector<std::vector<double>> rows(h_max);  // rows[r] = phi_{n+r, .}
  for (int j = 1; j <= N; ++j) {
    double acc = gamma[j];
    for (int i = 1; i < j; ++i) acc -= prev[i - 1] * gamma[j - i];
    const double refl = acc / v[j - 1];
    cur[j - 1] = refl;
    for (int i = 1; i < j; ++i) cur[i - 1] = prev[i - 1] - refl * prev[j - i - 1];
    v[j] = v[j - 1] * (1.0 - refl * refl);
    if (!(v[j] > 0.0))
      throw std::runtime_error("conditional_forecast: innovation variance vanished at order " +
                               std::to_string(j));
    std::swap(prev, cur);
    if (j >= n) rows[j - n].assign(prev.begin(), prev.begin() + j);
  }

  ConditionalForecast out;
  out.mean.resize(h_max);
  out.mse.resize(h_max);

  // Means: iterate the one-step predictors, substituting forecasts for the
  // unobserved values.
  std::vector<double> z(history.begin(), history.end());
  z.resize(n + h_max);
  for (int h = 1; h <= h_max; ++h) {
    const int order = n + h - 1;
    const auto& row = rows[h - 1];
    double acc = 0.0;
    for (int i = 1; i <= order; ++i) acc += row[i - 1] * z[order - i];
    z[n + h - 1] = acc;
    out.mean[h - 1] = acc;
  }

  // Variances via the innovations expansion.
  for (int h = 1; h <= h_max; ++h) {
    double mse = 0.0;
    for (int j = n + 1; j <= n + h; ++j) {
      const int lag = n + h - j;
      double cov = gamma[lag];
      if (j - 1 >= 1) {
        const auto& row = rows[j - 1 - n];  // phi_{j-1,.}
        for (int i = 1; i <= j - 1; ++i) cov -= row[i - 1] * gamma[lag + i];
      }
      const double c = cov / v[j - 1];
      mse += c * c * v[j - 1];
    }
    out.mse[h - 1] = mse;
  }
  return out;
}

PredictiveResult posterior_predictive(std::span<const double> y,
                                      const std::vector<std::vector<double>>& X,
                                      const std::vector<std::vector<double>>& X_future,
                                      const ModelSpec& spec, const Eigen::MatrixXd& draws,
                                      const ForecastConfig& cfg) {
  const int n_total = static_cast<int>(y.size());
  const int m = spec.m;
  if (static_cast<int>(X.size()) != m || static_cast<int>(X_future.size()) != m)
    throw std::invalid_argument("posterior_predictive: regressor layout mismatch");
  for (const auto& col : X)
    if (static_cast<int>(col.size()) != n_total)
      throw std::invalid_argument("posterior_predictive: regressor length mismatch");
  for (const auto& col : X_future)
    if (static_cast<int>(col.size()) < cfg.h_max)
      throw std::invalid_argument("posterior_predictive: future regressors shorter than h_max");
  if (cfg.h_max < 1) throw std::domain_error("posterior_predictive: h_max must be positive");
  if (draws.rows() == 0) throw std::domain_error("posterior_predictive: no posterior draws");
  if (draws.cols() != spec.dim())
    throw std::invalid_argument("posterior_predictive: draw dimension mismatch");

  const int W = cfg.window_W > 0 ? std::min(cfg.window_W, n_total) : std::min(n_total, 2048);
  const int offset = n_total - W;

  const double y_mean = std::accumulate(y.begin(), y.end(), 0.0) / n_total;
  std::vector<double> x_mean(m);
  for (int j = 0; j < m; ++j)
    x_mean[j] = std::accumulate(X[j].begin(), X[j].end(), 0.0) / n_total;

  const auto idx = thin_indices(static_cast<int>(draws.rows()), cfg.n_draws);
  const int M = static_cast<int>(idx.size());

  PredictiveResult out;
  out.component_mean.resize(M, cfg.h_max);
  out.component_var.resize(M, cfg.h_max);
  out.draws.resize(M, cfg.h_max);

  auto rng = make_rng(cfg.seed, cfg.stream);
  std::vector<double> history(W);
  int used = 0;
  for (int r = 0; r < M; ++r) {
    const Eigen::VectorXd row = draws.row(idx[r]).transpose();
    try {
      const ParamVector theta = to_natural(unpack(row, spec), spec);
      // Implicit intercept from demeaning: mu_hat = y_mean - x_mean' beta.
      double mu = y_mean;
      for (int j = 0; j < m; ++j) mu -= x_mean[j] * theta.beta[j];
      for (int t = 0; t < W; ++t) {
        double e = y[offset + t] - mu;
        for (int j = 0; j < m; ++j) e -= theta.beta[j] * X[j][offset + t];
        history[t] = e;
      }
      const auto gamma = autocovariance(theta, spec, W + cfg.h_max - 1);
      const auto cf = conditional_forecast(history, gamma, cfg.h_max);
      const Eigen::VectorXd noise = draw_std_normal(rng, cfg.h_max);
      for (int h = 0; h < cfg.h_max; ++h) {
        double reg = mu;
        for (int j = 0; j < m; ++j) reg += theta.beta[j] * X_future[j][h];
        out.component_mean(used, h) = reg + cf.mean[h];
        out.component_var(used, h) = cf.mse[h];
        out.draws(used, h) = out.component_mean(used, h) + std::sqrt(cf.mse[h]) * noise[h];
      }
      ++used;
    } catch (const std::exception&) {
      ++out.n_failed_draws;
      draw_std_normal(rng, cfg.h_max);  // keep the stream aligned across draws
    }
  }
  if (used == 0) throw std::runtime_error("posterior_predictive: every posterior draw failed");
  out.component_mean.conservativeResize(used, cfg.h_max);
  out.component_var.conservativeResize(used, cfg.h_max);
  out.draws.conservativeResize(used, cfg.h_max);
  out.n_components = used;

  out.point.resize(cfg.h_max);
  out.quantiles.resize(static_cast<int>(cfg.quantile_levels.size()), cfg.h_max);
  std::vector<double> col(used);
  for (int h = 0; h < cfg.h_max; ++h) {
    for (int r = 0; r < used; ++r) col[r] = out.draws(r, h);
    out.point[h] = std::accumulate(col.begin(), col.end(), 0.0) / used;
    std::sort(col.begin(), col.end());
    for (std::size_t l = 0; l < cfg.quantile_levels.size(); ++l)
      out.quantiles(static_cast<int>(l), h) = empirical_quantile(col, cfg.quantile_levels[l]);
  }
  return out;
}

double log_mixture_density(const PredictiveResult& pred, int h_index, double y_obs) {
  const int M = pred.n_components;
  if (h_index < 0 || h_index >= pred.component_mean.cols())
    throw std::domain_error("log_mixture_density: horizon index out of range");
  std::vector<double> lp(M, kNegInf);
  double lp_max = kNegInf;
  for (int r = 0; r < M; ++r) {
    const double v = pred.component_var(r, h_index);
    if (!(v > 0.0)) continue;
    const double d = y_obs - pred.component_mean(r, h_index);
    lp[r] = -0.5 * (std::log(2.0 * M_PI * v) + d * d / v);
    lp_max = std::max(lp_max, lp[r]);
  }
  if (!std::isfinite(lp_max)) return kNegInf;
  double acc = 0.0;
  for (int r = 0; r < M; ++r) acc += std::exp(lp[r] - lp_max);
  return lp_max + std::log(acc / M);
}

double crps_sample(std::span<const double> sample, double y_obs) {
  const int M = static_cast<int>(sample.size());
  if (M == 0) throw std::domain_error("crps_sample: empty sample");
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  double abs_err = 0.0, spread = 0.0;
  for (int i = 0; i < M; ++i) {
    abs_err += std::abs(s[i] - y_obs);
    spread += (2.0 * (i + 1) - M - 1) * s[i];
  }
  return abs_err / M - spread / (static_cast<double>(M) * M);
}

DicResult dic(const DftCache& cache, const ModelSpec& spec, const ChainResult& chain, int k_cut) {
  DicResult out;
  const int n_kept = chain.n_kept();
  if (n_kept == 0) throw std::domain_error("dic: empty chain");
  double dev_acc = 0.0;
  Eigen::VectorXd nat_acc = Eigen::VectorXd::Zero(spec.dim());
  for (int i = 0; i < n_kept; ++i) {
    try {
      const ParamVector theta = to_natural(unpack(chain.draws.row(i).transpose(), spec), spec);
      const double ll = whittle_loglik(cache, theta, spec, k_cut);
      dev_acc += -2.0 * ll;
      nat_acc += pack_natural(theta, spec);
      ++out.n_draws_used;
    } catch (const std::exception&) {
      // skip draws where the likelihood cannot be evaluated
    }
  }
  if (out.n_draws_used == 0) throw std::runtime_error("dic: likelihood failed on every draw");
  out.d_bar = dev_acc / out.n_draws_used;
  try {
    const ParamVector theta_star =
        unpack_natural(Eigen::VectorXd(nat_acc / out.n_draws_used), spec);
    const double ll_star = whittle_loglik(cache, theta_star, spec, k_cut);
    out.p_d = out.d_bar + 2.0 * ll_star;
    out.theta_star_valid = true;
  } catch (const std::exception&) {
    out.p_d = std::numeric_limits<double>::quiet_NaN();
    out.theta_star_valid = false;
  }
  out.dic = out.d_bar + out.p_d;
  return out;
}

CvResult rolling_cv(std::span<const double> y, const std::vector<std::vector<double>>& X,
                    const ModelSpec& spec, const CvConfig& cfg) {
  if (cfg.train_T < 8) throw std::domain_error("rolling_cv: train_T too small");
  if (cfg.k < 1) throw std::domain_error("rolling_cv: need at least one window");
  if (cfg.h_max < 1 || cfg.h_max > cfg.k)
    throw std::domain_error("rolling_cv: h_max must lie in [1, k]");
  const int needed = cfg.train_T + cfg.k;
  if (static_cast<int>(y.size()) < needed)
    throw std::domain_error("rolling_cv: series shorter than train_T + k");
  for (const auto& col : X)
    if (static_cast<int>(col.size()) < needed)
      throw std::domain_error("rolling_cv: regressor shorter than train_T + k");

  const int m = spec.m;
  CvResult out;
  out.rmse.assign(cfg.h_max, 0.0);
  out.lpds.assign(cfg.h_max, 0.0);
  out.crps.assign(cfg.h_max, 0.0);
  out.n_points.assign(cfg.h_max, 0);
  std::vector<int> n_dens(cfg.h_max, 0);
  std::vector<double> se_acc(cfg.h_max, 0.0), lp_acc(cfg.h_max, 0.0), crps_acc(cfg.h_max, 0.0);

  std::optional<Eigen::VectorXd> warm_init;
  std::optional<Eigen::MatrixXd> warm_cov;
  Eigen::MatrixXd active_draws;

  std::vector<double> y_train(cfg.train_T);
  std::vector<std::vector<double>> x_train(m, std::vector<double>(cfg.train_T));
  for (int i = 0; i < cfg.k; ++i) {
    for (int t = 0; t < cfg.train_T; ++t) y_train[t] = y[i + t];
    for (int j = 0; j < m; ++j)
      for (int t = 0; t < cfg.train_T; ++t) x_train[j][t] = X[j][i + t];

    try {
      if (i == 0 || cfg.refit_each_window) {
        const DftCache cache = precompute_dft(y_train, x_train);
        FitConfig fc;
        fc.sampler = cfg.sampler;
        fc.sampler.stream = cfg.sampler.stream + static_cast<std::uint64_t>(i);
        fc.k_cut = cfg.k_cut;
        fc.map_restarts = cfg.map_restarts;
        fc.init = warm_init;
        fc.init_cov = warm_cov;
        const FitResult fit = fit_model(cache, spec, fc);
        active_draws = fit.chain.draws;
        warm_init = Eigen::VectorXd(fit.chain.draws.row(fit.chain.n_kept() - 1).transpose());
        warm_cov = fit.chain.proposal_cov_final;
      }

      const int h_eval = std::min(cfg.h_max, cfg.k - i);
      std::vector<std::vector<double>> x_future(m, std::vector<double>(h_eval));
      for (int j = 0; j < m; ++j)
        for (int h = 0; h < h_eval; ++h) x_future[j][h] = X[j][i + cfg.train_T + h];

      ForecastConfig fcfg;
      fcfg.h_max = h_eval;
      fcfg.n_draws = cfg.n_draws;
      fcfg.window_W = cfg.window_W;
      fcfg.seed = cfg.sampler.seed;
      fcfg.stream = 5000 + static_cast<std::uint64_t>(i);
      const PredictiveResult pred =
          posterior_predictive(y_train, x_train, x_future, spec, active_draws, fcfg);

      std::vector<double> sample(pred.n_components);
      for (int h = 0; h < h_eval; ++h) {
        const double y_true = y[i + cfg.train_T + h];
        const double err = y_true - pred.point[h];
        se_acc[h] += err * err;
        for (int r = 0; r < pred.n_components; ++r) sample[r] = pred.draws(r, h);
        crps_acc[h] += crps_sample(std::span<const double>(sample.data(), pred.n_components),
                                   y_true);
        ++out.n_points[h];
        const double lp = log_mixture_density(pred, h, y_true);
        if (std::isfinite(lp)) {
          lp_acc[h] += lp;
          ++n_dens[h];
        } else {
          ++out.n_dropped_densities;
        }
      }
    } catch (const std::exception& e) {
      ++out.n_skipped_windows;
      out.warnings.push_back("window " + std::to_string(i) + ": " + e.what());
    }
  }

  for (int h = 0; h < cfg.h_max; ++h) {
    out.rmse[h] = out.n_points[h] > 0 ? std::sqrt(se_acc[h] / out.n_points[h])
                                      : std::numeric_limits<double>::quiet_NaN();
    out.crps[h] = out.n_points[h] > 0 ? crps_acc[h] / out.n_points[h]
                                      : std::numeric_limits<double>::quiet_NaN();
    out.lpds[h] = n_dens[h] > 0 ? -lp_acc[h] / n_dens[h]
                                : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace dlr
