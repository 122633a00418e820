#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "dlr/fit.hpp"
#include "dlr/forecast.hpp"
#include "dlr/model.hpp"
#include "dlr/sampler.hpp"
#include "dlr/simulate.hpp"
#include "dlr/spectrum.hpp"
#include "dlr/whittle.hpp"

using namespace dlr;

namespace {

std::vector<double> geometric_gamma(double phi, double sigma2, int len) {
  std::vector<double> g(len);
  g[0] = sigma2 / (1.0 - phi * phi);
  for (int k = 1; k < len; ++k) g[k] = g[k - 1] * phi;
  return g;
}

// Exact CRPS by piecewise-constant integration of (F_hat(x) - 1{x >= y})^2
// over the breakpoints of the empirical CDF.
double crps_quadrature(std::vector<double> sample, double y) {
  std::sort(sample.begin(), sample.end());
  const int M = static_cast<int>(sample.size());
  std::vector<double> breaks = sample;
  breaks.push_back(y);
  std::sort(breaks.begin(), breaks.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = breaks[i], hi = breaks[i + 1];
    if (hi <= lo) continue;
    const double cdf =
        static_cast<double>(std::upper_bound(sample.begin(), sample.end(), lo) - sample.begin()) /
        M;
    const double ind = (lo >= y) ? 1.0 : 0.0;
    total += (cdf - ind) * (cdf - ind) * (hi - lo);
  }
  return total;
}

PredictiveResult constant_mixture(const std::vector<double>& means,
                                  const std::vector<double>& vars, int h_max = 1) {
  PredictiveResult pred;
  const int M = static_cast<int>(means.size());
  pred.component_mean = Eigen::MatrixXd(M, h_max);
  pred.component_var = Eigen::MatrixXd(M, h_max);
  for (int i = 0; i < M; ++i)
    for (int h = 0; h < h_max; ++h) {
      pred.component_mean(i, h) = means[i];
      pred.component_var(i, h) = vars[i];
    }
  pred.n_components = M;
  return pred;
}

}  // namespace

TEST_CASE("white-noise conditional forecast is flat at zero with constant variance") {
  std::vector<double> history = {0.3, -1.2, 0.7, 2.2, -0.5};
  std::vector<double> gamma(10, 0.0);
  gamma[0] = 1.7;
  ConditionalForecast fc = conditional_forecast(history, gamma, 4);
  REQUIRE(fc.mean.size() == 4);
  for (int h = 0; h < 4; ++h) {
    CHECK(fc.mean[h] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(fc.mse[h] == doctest::Approx(1.7).epsilon(1e-12));
  }
}

TEST_CASE("AR(1) conditional forecast has the textbook mean and variance profile") {
  const double phi = 0.65, sigma2 = 1.4;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> norm(0.0, 1.0);
  std::vector<double> history(50);
  for (auto& v : history) v = norm(rng);
  auto gamma = geometric_gamma(phi, sigma2, 50 + 6);
  ConditionalForecast fc = conditional_forecast(history, gamma, 6);
  const double last = history.back();
  for (int h = 1; h <= 6; ++h) {
    CHECK(fc.mean[h - 1] == doctest::Approx(std::pow(phi, h) * last).epsilon(1e-10));
    const double expected_var = sigma2 * (1.0 - std::pow(phi, 2 * h)) / (1.0 - phi * phi);
    CHECK(fc.mse[h - 1] == doctest::Approx(expected_var).epsilon(1e-10));
  }
}

TEST_CASE("MA(1) one-step forecast from a single observation") {
  const double psi = 0.5, sigma2 = 2.0;
  const double g0 = sigma2 * (1.0 + psi * psi), g1 = sigma2 * psi;
  std::vector<double> history = {1.3};
  std::vector<double> gamma = {g0, g1, 0.0, 0.0};
  ConditionalForecast fc = conditional_forecast(history, gamma, 2);
  CHECK(fc.mean[0] == doctest::Approx(g1 / g0 * 1.3).epsilon(1e-12));
  CHECK(fc.mse[0] == doctest::Approx(g0 - g1 * g1 / g0).epsilon(1e-12));
  // Beyond the MA range nothing is predictable.
  CHECK(fc.mean[1] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(fc.mse[1] == doctest::Approx(g0).epsilon(1e-12));
}

TEST_CASE("long-horizon forecasts relax to the unconditional distribution") {
  ModelSpec spec;
  spec.p = 2;
  spec.q = 1;
  ParamVector theta;
  theta.phi = {0.5, -0.3};
  theta.psi = {0.4};
  theta.sigma2_eps = 1.0;
  const int n = 40, h_max = 500;
  auto gamma = autocovariance(theta, spec, n + h_max - 1);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> norm(0.0, 1.0);
  std::vector<double> history(n);
  for (auto& v : history) v = norm(rng);
  ConditionalForecast fc = conditional_forecast(history, gamma, h_max);
  CHECK(std::abs(fc.mean[h_max - 1]) < 1e-3 * std::sqrt(gamma[0]));
  CHECK(fc.mse[h_max - 1] == doctest::Approx(gamma[0]).epsilon(1e-3));
}

TEST_CASE("conditional forecast variance never decreases with horizon") {
  auto rng = make_rng(123, 0);
  std::uniform_real_distribution<double> unif(-0.8, 0.8);
  std::uniform_int_distribution<int> order(0, 2);
  std::normal_distribution<double> norm(0.0, 1.0);

  for (int rep = 0; rep < 200; ++rep) {
    ModelSpec spec;
    spec.p = order(rng);
    spec.q = order(rng);
    ParamVector theta;
    {
      std::vector<double> pacf(spec.p);
      for (auto& r : pacf) r = unif(rng);
      theta.phi = pacf_to_ar(pacf);
    }
    {
      std::vector<double> pacf(spec.q);
      for (auto& r : pacf) r = unif(rng);
      theta.psi = ma_pacf_to_coef(pacf);
    }
    theta.sigma2_eps = std::exp(unif(rng));

    const int n = 30, h_max = 6;
    auto gamma = autocovariance(theta, spec, n + h_max - 1);
    std::vector<double> history(n);
    for (auto& v : history) v = norm(rng);
    ConditionalForecast fc = conditional_forecast(history, gamma, h_max);
    for (int h = 1; h < h_max; ++h)
      CHECK(fc.mse[h] >= fc.mse[h - 1] - 1e-7 * gamma[0]);
  }
}

TEST_CASE("conditional forecast validates its inputs") {
  std::vector<double> history = {1.0, 2.0};
  std::vector<double> gamma = {1.0, 0.5};  // too short for n + h_max - 1
  CHECK_THROWS_AS((void)conditional_forecast(history, gamma, 3), std::domain_error);
  CHECK_THROWS_AS((void)conditional_forecast(std::vector<double>{}, gamma, 1),
                  std::domain_error);
}

TEST_CASE("posterior predictive wires the regression and the implicit intercept") {
  // y = 5 + 2 x with zero error: every predictive component centres on
  // mu + beta x_future, where mu is recovered from the sample means.
  const int T = 120;
  std::vector<double> x(T), y(T);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> norm(0.0, 1.0);
  for (int t = 0; t < T; ++t) {
    x[t] = norm(rng);
    y[t] = 5.0 + 2.0 * x[t];
  }

  ModelSpec spec;
  spec.m = 1;
  const int M = 400;
  Eigen::MatrixXd draws(M, spec.dim());
  for (int i = 0; i < M; ++i) {
    draws(i, 0) = 0.0;  // log sigma2 -> unit variance
    draws(i, 1) = 2.0;  // beta
  }

  ForecastConfig cfg;
  cfg.h_max = 3;
  cfg.n_draws = M;
  cfg.seed = 12;
  std::vector<std::vector<double>> X_future = {{3.0, -1.0, 0.0}};
  PredictiveResult pred = posterior_predictive(y, {x}, X_future, spec, draws, cfg);

  REQUIRE(pred.n_components == M);
  REQUIRE(pred.point.size() == 3);
  const double targets[3] = {5.0 + 2.0 * 3.0, 5.0 - 2.0, 5.0};
  for (int h = 0; h < 3; ++h) {
    CHECK(pred.component_mean(0, h) == doctest::Approx(targets[h]).epsilon(1e-6));
    CHECK(pred.component_var(0, h) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(pred.point[h] - targets[h]) < 4.0 / std::sqrt(double(M)) + 0.05);
  }
  // Quantile rows follow cfg.quantile_levels = {0.05, 0.5, 0.95}.
  REQUIRE(pred.quantiles.rows() == 3);
  CHECK(pred.quantiles(1, 0) == doctest::Approx(targets[0]).epsilon(0.05));
  CHECK(pred.quantiles(0, 0) < pred.quantiles(1, 0));
  CHECK(pred.quantiles(2, 0) > pred.quantiles(1, 0));
  CHECK(pred.quantiles(2, 0) - pred.quantiles(0, 0) == doctest::Approx(2 * 1.645).epsilon(0.15));
}

TEST_CASE("log mixture density matches closed forms") {
  // Identical standard-normal components evaluated at their centre.
  PredictiveResult pred = constant_mixture({0.0, 0.0, 0.0, 0.0, 0.0}, {1.0, 1.0, 1.0, 1.0, 1.0});
  CHECK(log_mixture_density(pred, 0, 0.0) ==
        doctest::Approx(-0.91893853320467267).epsilon(1e-12));

  // Two-component mixture of N(0,1) and N(1,4) at y = 0.3, frozen reference.
  PredictiveResult two = constant_mixture({0.0, 1.0}, {1.0, 4.0});
  CHECK(log_mixture_density(two, 0, 0.3) == doctest::Approx(-1.2570079852348899).epsilon(1e-12));

  // Far in the tail the density underflows to -inf rather than NaN.
  PredictiveResult tight = constant_mixture({0.0}, {1e-6});
  CHECK(std::isinf(log_mixture_density(tight, 0, 1e200)));
}

TEST_CASE("sample CRPS reproduces tiny hand-computed cases") {
  std::vector<double> single = {0.0};
  CHECK(crps_sample(single, 0.7) == doctest::Approx(0.7).epsilon(1e-14));
  std::vector<double> pair = {-1.0, 1.0};
  CHECK(crps_sample(pair, 0.0) == doctest::Approx(0.5).epsilon(1e-14));
  // Degenerate forecast at the truth scores zero.
  std::vector<double> exact = {2.0, 2.0, 2.0};
  CHECK(crps_sample(exact, 2.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
}

TEST_CASE("sample CRPS equals the CDF quadrature on random mixtures") {
  auto rng = make_rng(55, 0);
  std::normal_distribution<double> norm(0.0, 1.0);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  for (int set = 0; set < 100; ++set) {
    const double mu = unif(rng), scale = 0.2 + std::abs(unif(rng));
    std::vector<double> sample(1000);
    for (auto& v : sample) v = mu + scale * norm(rng);
    const double y = unif(rng);
    const double fast = crps_sample(sample, y);
    const double slow = crps_quadrature(sample, y);
    CHECK(fast == doctest::Approx(slow).epsilon(1e-3));
  }
}

TEST_CASE("sample CRPS converges to the analytic value for a standard normal") {
  const int M = 100000;
  auto rng = make_rng(77, 0);
  std::normal_distribution<double> norm(0.0, 1.0);
  std::vector<double> sample(M);
  for (auto& v : sample) v = norm(rng);
  // CRPS of the standard normal at its centre: (sqrt(2) - 1) / sqrt(pi).
  CHECK(crps_sample(sample, 0.0) == doctest::Approx(0.23369497725510915).scale(1.0).epsilon(0.05));
  CHECK(std::abs(crps_sample(sample, 0.0) - 0.23369497725510915) < 0.01);
}

TEST_CASE("CRPS is a proper score over forecast dispersion") {
  // Truth is standard normal; predictive samples with the correct scale beat
  // both under- and over-dispersed alternatives on average.
  auto rng = make_rng(88, 0);
  std::normal_distribution<double> norm(0.0, 1.0);
  const int n_truth = 200, M = 2000;
  std::vector<double> y(n_truth);
  for (auto& v : y) v = norm(rng);

  double mean_score[3] = {0.0, 0.0, 0.0};
  const double scales[3] = {0.5, 1.0, 2.0};
  for (int s = 0; s < 3; ++s) {
    std::vector<double> sample(M);
    for (auto& v : sample) v = scales[s] * norm(rng);
    for (double obs : y) mean_score[s] += crps_sample(sample, obs) / n_truth;
  }
  CHECK(mean_score[1] < mean_score[0]);
  CHECK(mean_score[1] < mean_score[2]);
}

TEST_CASE("DIC collapses to zero effective parameters on a degenerate chain") {
  DlrSimResult sim;
  {
    ModelSpec err;
    err.p = 1;
    ParamVector theta;
    theta.phi = {0.5};
    theta.sigma2_eps = 1.0;
    ModelSpec xs;
    ParamVector tx;
    tx.sigma2_eps = 1.0;
    sim = simulate_dlr(err, theta, xs, tx, 300, 5);
  }
  DftCache cache = precompute_dft(sim.y, {});
  ModelSpec spec;
  spec.p = 1;

  ChainResult chain;
  chain.draws = Eigen::MatrixXd(50, spec.dim());
  Eigen::VectorXd row(spec.dim());
  row << std::atanh(0.5), std::log(1.0);
  for (int i = 0; i < 50; ++i) chain.draws.row(i) = row;

  DicResult res = dic(cache, spec, chain);
  CHECK(res.theta_star_valid);
  CHECK(res.p_d == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
  CHECK(res.dic == doctest::Approx(res.d_bar).epsilon(1e-10));
  CHECK(res.n_draws_used == 50);

  // Two-point chain: the identity p_d = mean deviance minus deviance at the
  // natural-space mean, recomputed here straight from the likelihood.
  ChainResult two;
  two.draws = Eigen::MatrixXd(2, spec.dim());
  two.draws.row(0) << std::atanh(0.4), std::log(0.8);
  two.draws.row(1) << std::atanh(0.6), std::log(1.3);
  DicResult r2 = dic(cache, spec, two);

  auto loglik_at = [&](const Eigen::VectorXd& v) {
    ParamVector theta = to_natural(unpack(v, spec), spec);
    return whittle_loglik(cache, theta, spec);
  };
  double d_bar = -2.0 * 0.5 * (loglik_at(two.draws.row(0)) + loglik_at(two.draws.row(1)));
  ParamVector n0 = to_natural(unpack(two.draws.row(0), spec), spec);
  ParamVector n1 = to_natural(unpack(two.draws.row(1), spec), spec);
  ParamVector star;
  star.phi = {0.5 * (n0.phi[0] + n1.phi[0])};
  star.sigma2_eps = 0.5 * (n0.sigma2_eps + n1.sigma2_eps);
  double d_star = -2.0 * whittle_loglik(cache, star, spec);
  CHECK(r2.d_bar == doctest::Approx(d_bar).epsilon(1e-10));
  CHECK(r2.p_d == doctest::Approx(d_bar - d_star).scale(1.0).epsilon(1e-8));
  CHECK(r2.dic == doctest::Approx(d_bar + (d_bar - d_star)).epsilon(1e-8));
}

TEST_CASE("DIC on a fitted chain reports a plausible effective parameter count") {
  DlrSimResult sim;
  ModelSpec err;
  err.p = 1;
  {
    ParamVector theta;
    theta.phi = {0.5};
    theta.sigma2_eps = 1.0;
    ModelSpec xs;
    ParamVector tx;
    tx.sigma2_eps = 1.0;
    sim = simulate_dlr(err, theta, xs, tx, 400, 6);
  }
  DftCache cache = precompute_dft(sim.y, {});
  FitConfig fc;
  fc.sampler.n_iter = 3000;
  fc.sampler.burn_in = 1000;
  fc.sampler.seed = 21;
  fc.map_restarts = 2;
  FitResult fit = fit_model(cache, err, fc);
  DicResult res = dic(cache, err, fit.chain);
  CHECK(res.theta_star_valid);
  CHECK(res.p_d > -0.5);
  CHECK(res.p_d < 10.0);
  CHECK(res.n_draws_used == fit.chain.n_kept());
}

TEST_CASE("rolling evaluation with a single origin scores exactly one point") {
  auto rng = make_rng(61, 0);
  std::normal_distribution<double> norm(0.0, 1.0);
  std::vector<double> y(151);
  for (auto& v : y) v = norm(rng);

  ModelSpec spec;  // white noise
  CvConfig cfg;
  cfg.train_T = 150;
  cfg.k = 1;
  cfg.h_max = 1;
  cfg.n_draws = 100;
  cfg.map_restarts = 2;
  cfg.sampler.n_iter = 600;
  cfg.sampler.burn_in = 200;
  cfg.sampler.seed = 3;
  CvResult res = rolling_cv(y, {}, spec, cfg);
  REQUIRE(res.n_points.size() == 1);
  CHECK(res.n_points[0] == 1);
  CHECK(res.n_skipped_windows == 0);
  CHECK(std::isfinite(res.rmse[0]));
  CHECK(std::isfinite(res.lpds[0]));
  CHECK(std::isfinite(res.crps[0]));
}

TEST_CASE("rolling evaluation of white noise recovers the theoretical scores") {
  auto rng = make_rng(62, 0);
  std::normal_distribution<double> norm(0.0, 1.0);
  std::vector<double> y(360);
  for (auto& v : y) v = norm(rng);

  ModelSpec spec;  // white noise, no regressors
  CvConfig cfg;
  cfg.train_T = 300;
  cfg.k = 60;
  cfg.h_max = 1;
  cfg.n_draws = 200;
  cfg.refit_each_window = false;
  cfg.map_restarts = 2;
  cfg.sampler.n_iter = 800;
  cfg.sampler.burn_in = 300;
  cfg.sampler.seed = 8;
  CvResult res = rolling_cv(y, {}, spec, cfg);

  REQUIRE(res.n_points.size() == 1);
  CHECK(res.n_points[0] == 60);
  // RMSE near sigma = 1, negated mean log density near 0.5 log(2 pi) + 0.5,
  // CRPS near the standard-normal value at a typical observation.
  CHECK(res.rmse[0] == doctest::Approx(1.0).epsilon(0.25));
  CHECK(res.lpds[0] == doctest::Approx(0.5 * std::log(2.0 * M_PI) + 0.5).epsilon(0.15));
  CHECK(res.crps[0] == doctest::Approx(0.5642).epsilon(0.25));
}

TEST_CASE("rolling evaluation counts k - h + 1 scores per horizon") {
  auto rng = make_rng(63, 0);
  std::normal_distribution<double> norm(0.0, 1.0);
  std::vector<double> y(132);
  for (auto& v : y) v = norm(rng);

  ModelSpec spec;
  CvConfig cfg;
  cfg.train_T = 120;
  cfg.k = 12;
  cfg.h_max = 4;
  cfg.n_draws = 100;
  cfg.refit_each_window = false;
  cfg.map_restarts = 2;
  cfg.sampler.n_iter = 500;
  cfg.sampler.burn_in = 200;
  cfg.sampler.seed = 9;
  CvResult res = rolling_cv(y, {}, spec, cfg);
  REQUIRE(res.n_points.size() == 4);
  CHECK(res.n_points[0] == 12);
  CHECK(res.n_points[1] == 11);
  CHECK(res.n_points[2] == 10);
  CHECK(res.n_points[3] == 9);
}

TEST_CASE("rolling evaluation rejects a series shorter than train_T + k") {
  std::vector<double> y(100, 0.5);
  ModelSpec spec;
  CvConfig cfg;
  cfg.train_T = 90;
  cfg.k = 20;
  cfg.sampler.n_iter = 200;
  cfg.sampler.burn_in = 50;
  CHECK_THROWS_AS((void)rolling_cv(y, {}, spec, cfg), std::domain_error);
}
