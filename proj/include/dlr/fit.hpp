// Glue between the Whittle likelihood, the priors and the sampler: builds the
// unconstrained-space log posterior for a dataset and runs the mode search
// plus adaptive chain that together constitute a model fit.

#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "dlr/model.hpp"
#include "dlr/sampler.hpp"
#include "dlr/whittle.hpp"

namespace dlr {

// log posterior over packed unconstrained coordinates; evaluation errors
// (non-stationary proposals and the like) surface as exceptions, which the
// sampler treats as zero density.
LogDensityFn make_log_posterior(const DftCache& cache, const ModelSpec& spec, int k_cut = 0);

enum class LikelihoodKind { whittle, gaussian, kalman };

std::string likelihood_name(LikelihoodKind kind);

// Time-domain counterpart: residuals y - X beta are demeaned (the implicit
// intercept, matching the dropped zero frequency of the Whittle version) and
// scored by the exact Gaussian or Kalman-filter likelihood.  y and X are
// copied into the closure.
LogDensityFn make_log_posterior_time_domain(std::span<const double> y,
                                            const std::vector<std::vector<double>>& X,
                                            const ModelSpec& spec, LikelihoodKind kind);

// Draws from the prior in unconstrained coordinates, for optimizer restarts.
PriorDrawFn make_prior_draw(const ModelSpec& spec);

struct FitConfig {
  SamplerSettings sampler;
  int k_cut = 0;
  int map_restarts = 8;
  // When set, skip the mode search and start the chain here (with init_cov if
  // also provided) -- used to warm-start successive rolling-window refits.
  std::optional<Eigen::VectorXd> init;
  std::optional<Eigen::MatrixXd> init_cov;
};

struct FitResult {
  MapResult map;            // meaningful only when the mode search ran
  bool map_searched = false;
  ChainResult chain;
  Eigen::VectorXd posterior_mean_natural;  // mean of natural-coordinate draws
};

FitResult fit_model(const DftCache& cache, const ModelSpec& spec, const FitConfig& cfg);

}  // namespace dlr
