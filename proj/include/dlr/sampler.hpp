// MAP optimization, adaptive random-walk Metropolis-Hastings and chain
// diagnostics.  Everything works on the flat unconstrained coordinates; the
// target density is supplied as a callable and exceptions thrown by it are
// treated as log-density -infinity (the proposal is rejected, never the run).

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace dlr {

using LogDensityFn = std::function<double(const Eigen::VectorXd&)>;
using PriorDrawFn = std::function<Eigen::VectorXd(std::mt19937_64&)>;

struct SamplerSettings {
  int n_iter = 10000;
  int burn_in = 3000;
  double target_accept = 0.234;
  int adapt_start = 200;        // iterations before covariance adaptation kicks in
  double rm_step_scale = 1.0;   // Robbins-Monro gain constant for the scale
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;     // distinguishes chains / replicates under one seed
  double regularization = 1e-10;
  double init_scale = -1.0;     // proposal scale c; < 0 means 2.38^2 / dim

  void validate() const;
};

struct ChainResult {
  Eigen::MatrixXd draws;  // n_kept x dim, unconstrained coordinates
  std::vector<double> log_post;
  double accept_rate = 0.0;
  Eigen::MatrixXd proposal_cov_final;
  double scale_final = 0.0;
  std::vector<double> ess;                  // per coordinate, on kept draws
  std::vector<std::uint8_t> accept_history; // full n_iter accept/reject trace

  int n_kept() const { return static_cast<int>(draws.rows()); }
  int dim() const { return static_cast<int>(draws.cols()); }
};

struct MapResult {
  Eigen::VectorXd point;
  double value = 0.0;
  Eigen::MatrixXd cov_seed;  // inverse negative Hessian when PD, else 0.01 I
  bool hessian_pd = false;
};

// Multi-start MAP search: the origin plus `restarts` points drawn from
// `prior_draw` (standard normal coordinates when absent), each refined by
// Nelder-Mead and polished by finite-difference BFGS.  Throws
// std::runtime_error when every start has a non-finite objective.
MapResult find_map(const LogDensityFn& log_post, int dim, int restarts = 20,
                   const PriorDrawFn& prior_draw = nullptr, std::uint64_t seed = 0);

// Gaussian random-walk MH with Haario covariance adaptation after
// `adapt_start` iterations and Robbins-Monro tuning of the scalar scale
// toward `target_accept`.  Fixed RNG consumption per iteration (dim normals
// plus one uniform) makes runs bit-reproducible under one seed.
ChainResult run_adaptive_mh(const LogDensityFn& log_post, const Eigen::VectorXd& init,
                            const SamplerSettings& settings,
                            const std::optional<Eigen::MatrixXd>& init_cov = std::nullopt);

// N over the autocorrelation inefficiency factor; autocorrelations come from
// an FFT and the sum is truncated by Geyer's initial-positive-sequence rule
// on lag pairs.  A constant chain yields 0 and sets *degenerate.  Requires
// N >= 100.
double effective_sample_size(std::span<const double> chain_column, bool* degenerate = nullptr);

// Shared RNG helpers, exposed so replay-style tests can reproduce the exact
// per-iteration draw sequence of run_adaptive_mh.
Eigen::VectorXd draw_std_normal(std::mt19937_64& rng, int dim);
double draw_uniform(std::mt19937_64& rng);
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream);

}  // namespace dlr
