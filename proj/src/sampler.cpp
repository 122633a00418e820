#include "dlr/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dlr/fft.hpp"

namespace dlr {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Exceptions and NaNs from the target density mean "outside the support".
double safe_eval(const LogDensityFn& f, const Eigen::VectorXd& x) {
  try {
    const double v = f(x);
    return std::isnan(v) ? kNegInf : v;
  } catch (const std::exception&) {
    return kNegInf;
  }
}

// ---------------------------------------------------------------- Nelder-Mead

struct SimplexPoint {
  Eigen::VectorXd x;
  double f;  // objective to minimise
};

Eigen::VectorXd nelder_mead(const std::function<double(const Eigen::VectorXd&)>& objective,
                            const Eigen::VectorXd& start, int max_evals) {
  const int dim = static_cast<int>(start.size());
  const double alpha = 1.0, gamma = 2.0, rho = 0.5, shrink = 0.5;

  std::vector<SimplexPoint> simplex;
  simplex.reserve(dim + 1);
  simplex.push_back({start, objective(start)});
  for (int i = 0; i < dim; ++i) {
    Eigen::VectorXd xi = start;
    xi[i] += 0.5 * std::max(1.0, std::abs(start[i]));
    simplex.push_back({xi, objective(xi)});
  }
  int evals = dim + 1;

  auto order = [&] {
    std::sort(simplex.begin(), simplex.end(),
              [](const SimplexPoint& a, const SimplexPoint& b) { return a.f < b.f; });
  };
  order();

  while (evals < max_evals) {
    if (std::abs(simplex.back().f - simplex.front().f) <=
        1e-10 * (1.0 + std::abs(simplex.front().f)))
      break;
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
    for (int i = 0; i < dim; ++i) centroid += simplex[i].x;
    centroid /= dim;

    const Eigen::VectorXd xr = centroid + alpha * (centroid - simplex.back().x);
    const double fr = objective(xr);
    ++evals;
    if (fr < simplex.front().f) {
      const Eigen::VectorXd xe = centroid + gamma * (xr - centroid);
      const double fe = objective(xe);
      ++evals;
      simplex.back() = fe < fr ? SimplexPoint{xe, fe} : SimplexPoint{xr, fr};
    } else if (fr < simplex[dim - 1].f) {
      simplex.back() = {xr, fr};
    } else {
      const Eigen::VectorXd xc = centroid + rho * (simplex.back().x - centroid);
      const double fc = objective(xc);
      ++evals;
      if (fc < simplex.back().f) {
        simplex.back() = {xc, fc};
      } else {
        for (int i = 1; i <= dim; ++i) {
          simplex[i].x = simplex.front().x + shrink * (simplex[i].x - simplex.front().x);
          simplex[i].f = objective(simplex[i].x);
        }
        evals += dim;
      }
    }
    order();
  }
  return simplex.front().x;
}

// ------------------------------------------------- finite-difference helpers

Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& objective,
                            const Eigen::VectorXd& x) {
  const int dim = static_cast<int>(x.size());
  Eigen::VectorXd g(dim);
  Eigen::VectorXd xp = x;
  for (int i = 0; i < dim; ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
    xp[i] = x[i] + h;
    const double fp = objective(xp);
    xp[i] = x[i] - h;
    const double fm = objective(xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

Eigen::MatrixXd fd_hessian(const LogDensityFn& log_post, const Eigen::VectorXd& x) {
  const int dim = static_cast<int>(x.size());
  Eigen::MatrixXd H(dim, dim);
  const double f0 = safe_eval(log_post, x);
  Eigen::VectorXd h(dim);
  for (int i = 0; i < dim; ++i) h[i] = 1e-4 * std::max(1.0, std::abs(x[i]));
  Eigen::VectorXd xp = x;
  for (int i = 0; i < dim; ++i) {
    xp[i] = x[i] + h[i];
    const double fp = safe_eval(log_post, xp);
    xp[i] = x[i] - h[i];
    const double fm = safe_eval(log_post, xp);
    xp[i] = x[i];
    H(i, i) = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
  }
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      xp[i] = x[i] + h[i]; xp[j] = x[j] + h[j];
      const double fpp = safe_eval(log_post, xp);
      xp[j] = x[j] - h[j];
      const double fpm = safe_eval(log_post, xp);
      xp[i] = x[i] - h[i]; xp[j] = x[j] + h[j];
      const double fmp = safe_eval(log_post, xp);
      xp[j] = x[j] - h[j];
      const double fmm = safe_eval(log_post, xp);
      xp[i] = x[i]; xp[j] = x[j];
      H(i, j) = H(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
    }
  }
  return H;
}

// BFGS with finite-difference gradients and a backtracking Armijo line search.
Eigen::VectorXd bfgs_polish(const std::function<double(const Eigen::VectorXd&)>& objective,
                            Eigen::VectorXd x, int max_iters) {
  const int dim = static_cast<int>(x.size());
  Eigen::MatrixXd Hinv = Eigen::MatrixXd::Identity(dim, dim);
  double fx = objective(x);
  Eigen::VectorXd g = fd_gradient(objective, x);
  for (int it = 0; it < max_iters; ++it) {
    if (!g.allFinite()) break;
    Eigen::VectorXd p = -Hinv * g;
    if (p.dot(g) >= 0.0) p = -g;  // reset to steepest descent when not a descent direction
    double step = 1.0;
    double f_new = std::numeric_limits<double>::infinity();
    Eigen::VectorXd x_new;
    bool ok = false;
    for (int ls = 0; ls < 40; ++ls) {
      x_new = x + step * p;
      f_new = objective(x_new);
      if (std::isfinite(f_new) && f_new <= fx + 1e-4 * step * g.dot(p)) {
        ok = true;
        break;
      }
      step *= 0.5;
    }
    if (!ok) break;
    const Eigen::VectorXd g_new = fd_gradient(objective, x_new);
    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd yv = g_new - g;
    const double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      const Eigen::VectorXd Hy = Hinv * yv;
      const double yHy = yv.dot(Hy);
      Hinv += ((sy + yHy) / (sy * sy)) * (s * s.transpose()) -
              (Hy * s.transpose() + s * Hy.transpose()) / sy;
    }
    const bool converged = std::abs(fx - f_new) <= 1e-12 * (1.0 + std::abs(fx));
    x = x_new;
    fx = f_new;
    g = g_new;
    if (converged) break;
  }
  return x;
}

}  // namespace

void SamplerSettings::validate() const {
  if (n_iter <= 0) throw std::domain_error("n_iter must be positive");
  if (burn_in < 0 || burn_in >= n_iter) throw std::domain_error("burn_in must satisfy 0 <= burn_in < n_iter");
  if (!(target_accept > 0.0 && target_accept < 1.0))
    throw std::domain_error("target_accept must lie in (0,1)");
  if (adapt_start < 0) throw std::domain_error("adapt_start must be non-negative");
  if (!(regularization >= 0.0)) throw std::domain_error("regularization must be non-negative");
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream & 0xffffffffu),
                    static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

Eigen::VectorXd draw_std_normal(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(dim);
  for (int i = 0; i < dim; ++i) z[i] = normal(rng);
  return z;
}

double draw_uniform(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  return uniform(rng);
}

MapResult find_map(const LogDensityFn& log_post, int dim, int restarts,
                   const PriorDrawFn& prior_draw, std::uint64_t seed) {
  if (dim <= 0) throw std::domain_error("find_map: dim must be positive");
  if (restarts < 0) throw std::domain_error("find_map: restarts must be non-negative");
  auto objective = [&](const Eigen::VectorXd& x) { return -safe_eval(log_post, x); };

  auto rng = make_rng(seed, 0x6d61705fu);  // dedicated stream for start points
  std::vector<Eigen::VectorXd> starts;
  starts.push_back(Eigen::VectorXd::Zero(dim));
  for (int r = 0; r < restarts; ++r)
    starts.push_back(prior_draw ? prior_draw(rng) : Eigen::VectorXd(draw_std_normal(rng, dim)));

  bool any_finite = false;
  Eigen::VectorXd best;
  double best_f = std::numeric_limits<double>::infinity();
  for (const auto& s : starts) {
    if (!std::isfinite(objective(s))) continue;
    any_finite = true;
    Eigen::VectorXd x = nelder_mead(objective, s, 150 * dim);
    x = bfgs_polish(objective, x, 60);
    const double fx = objective(x);
    if (fx < best_f) {
      best_f = fx;
      best = x;
    }
  }
  if (!any_finite)
    throw std::runtime_error("find_map: log posterior non-finite at every start point");

  MapResult result;
  result.point = best;
  result.value = -best_f;

  const Eigen::MatrixXd H = fd_hessian(log_post, best);
  Eigen::MatrixXd neg_H = -0.5 * (H + H.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(neg_H);
  const double max_eig = es.eigenvalues().maxCoeff();
  if (es.info() == Eigen::Success && es.eigenvalues().minCoeff() > 1e-10 * std::max(1.0, max_eig)) {
    result.cov_seed =
        es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    result.hessian_pd = true;
  } else {
    result.cov_seed = 0.01 * Eigen::MatrixXd::Identity(dim, dim);
    result.hessian_pd = false;
  }
  return result;
}

ChainResult run_adaptive_mh(const LogDensityFn& log_post, const Eigen::VectorXd& init,
                            const SamplerSettings& settings,
                            const std::optional<Eigen::MatrixXd>& init_cov) {
  settings.validate();
  const int dim = static_cast<int>(init.size());
  if (dim <= 0) throw std::domain_error("run_adaptive_mh: empty initial point");

  double lp = safe_eval(log_post, init);
  if (!std::isfinite(lp))
    throw std::runtime_error("run_adaptive_mh: log posterior non-finite at the initial point");

  auto rng = make_rng(settings.seed, settings.stream);
  const Eigen::MatrixXd cov0 =
      init_cov.value_or(Eigen::MatrixXd::Identity(dim, dim));
  if (cov0.rows() != dim || cov0.cols() != dim)
    throw std::invalid_argument("run_adaptive_mh: proposal covariance dimension mismatch");

  double log_c = std::log(settings.init_scale > 0.0 ? settings.init_scale : 2.38 * 2.38 / dim);
  const double log_c_floor = std::log(1e-6);
  const double log_c_cap = std::log(1e6);

  // Running mean / scatter over every chain state (Welford), used for the
  // Haario covariance adaptation.
  Eigen::VectorXd mean = init;
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(dim, dim);
  long n_states = 1;

  Eigen::VectorXd x = init;
  const int n_kept = settings.n_iter - settings.burn_in;
  ChainResult result;
  result.draws.resize(n_kept, dim);
  result.log_post.resize(n_kept);
  result.accept_history.assign(settings.n_iter, 0);

  Eigen::MatrixXd proposal_cov = cov0;
  auto chol_of = [&](double c) {
    Eigen::MatrixXd scaled = std::exp(c) * proposal_cov;
    Eigen::LLT<Eigen::MatrixXd> llt(scaled);
    double jitter = settings.regularization;
    while (llt.info() != Eigen::Success) {
      scaled.diagonal().array() += jitter;
      llt.compute(scaled);
      jitter = std::max(jitter * 10.0, 1e-12);
    }
    return Eigen::MatrixXd(llt.matrixL());
  };
  Eigen::MatrixXd L = chol_of(log_c);

  long accepted_total = 0;
  for (int j = 1; j <= settings.n_iter; ++j) {
    const Eigen::VectorXd xi = draw_std_normal(rng, dim);
    const double u = draw_uniform(rng);
    const Eigen::VectorXd proposal = x + L * xi;
    const double lp_prop = safe_eval(log_post, proposal);
    const double alpha = std::isfinite(lp_prop) ? std::min(1.0, std::exp(lp_prop - lp)) : 0.0;
    const bool accept = u < alpha;
    if (accept) {
      x = proposal;
      lp = lp_prop;
      ++accepted_total;
    }
    result.accept_history[j - 1] = accept ? 1 : 0;

    // Welford update with the new state (accepted or repeated).
    ++n_states;
    const Eigen::VectorXd dx = x - mean;
    mean += dx / static_cast<double>(n_states);
    scatter.noalias() += dx * (x - mean).transpose();

    // Robbins-Monro step on the log scale toward the target acceptance rate.
    const double gain = settings.rm_step_scale / std::max(1, j - settings.adapt_start);
    log_c = std::clamp(log_c + gain * (alpha - settings.target_accept), log_c_floor, log_c_cap);

    if (j > settings.adapt_start && accepted_total >= 2) {
      proposal_cov = scatter / static_cast<double>(n_states - 1);
      proposal_cov.diagonal().array() += settings.regularization;
    }
    L = chol_of(log_c);

    if (j > settings.burn_in) {
      result.draws.row(j - settings.burn_in - 1) = x.transpose();
      result.log_post[j - settings.burn_in - 1] = lp;
    }
  }

  result.accept_rate = static_cast<double>(accepted_total) / settings.n_iter;
  result.proposal_cov_final = proposal_cov;
  result.scale_final = std::exp(log_c);
  result.ess.resize(dim);
  for (int i = 0; i < dim; ++i) {
    if (n_kept >= 100) {
      std::vector<double> col(n_kept);
      for (int t = 0; t < n_kept; ++t) col[t] = result.draws(t, i);
      result.ess[i] = effective_sample_size(col);
    } else {
      result.ess[i] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return result;
}

double effective_sample_size(std::span<const double> chain_column, bool* degenerate) {
  const std::size_t n = chain_column.size();
  if (degenerate) *degenerate = false;
  if (n < 100) throw std::domain_error("effective_sample_size requires at least 100 draws");

  const bool all_equal = std::all_of(chain_column.begin(), chain_column.end(),
                                     [&](double v) { return v == chain_column.front(); });
  double mean = 0.0;
  for (double v : chain_column) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : chain_column) var += (v - mean) * (v - mean);
  // var can pick up rounding noise of order eps^2 even for a constant chain,
  // so the degeneracy test compares the raw values instead.
  if (all_equal || var == 0.0) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }

  const std::size_t padded = fft::next_pow2(2 * n);
  std::vector<std::complex<double>> buf(padded, 0.0);
  for (std::size_t t = 0; t < n; ++t) buf[t] = chain_column[t] - mean;
  auto F = fft::forward(buf);
  for (auto& c : F) c = std::norm(c);
  auto acov_fft = fft::inverse_unscaled(F);
  // biased autocovariances c_k, normalised so rho_0 = 1
  const double c0 = acov_fft[0].real();
  std::vector<double> rho(n);
  for (std::size_t k = 0; k < n; ++k) rho[k] = acov_fft[k].real() / c0;

  // Geyer initial positive sequence on lag pairs.
  double pair_sum = 0.0;
  for (std::size_t m = 0; 2 * m + 1 < n; ++m) {
    const double pair = rho[2 * m] + rho[2 * m + 1];
    if (pair <= 0.0) break;
    pair_sum += pair;
  }
  const double inefficiency = std::max(-1.0 + 2.0 * pair_sum, 1e-12);
  return static_cast<double>(n) / inefficiency;
}

}  // namespace dlr
