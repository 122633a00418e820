// Command-line front end: dataset ingestion, model fitting, forecasting,
// rolling-window evaluation, simulation and spectral diagnostics.  Every
// command writes its artifacts into a run directory together with an echoed
// configuration (sufficient to reproduce the run bit-for-bit) and a
// machine-readable status record.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dlr/fit.hpp"
#include "dlr/forecast.hpp"
#include "dlr/io.hpp"
#include "dlr/model.hpp"
#include "dlr/sampler.hpp"
#include "dlr/simulate.hpp"
#include "dlr/spectrum.hpp"
#include "dlr/time_domain.hpp"
#include "dlr/whittle.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

// ----------------------------------------------------------- option bundles

struct DataOptions {
  std::string path;
  std::string y_col = "y";
  std::vector<std::string> x_cols;
  std::vector<int> x_lags;
};

void add_data_options(CLI::App* cmd, DataOptions& o) {
  cmd->add_option("--data", o.path, "input CSV file")->required();
  cmd->add_option("--y-col", o.y_col, "response column name");
  cmd->add_option("--x-cols", o.x_cols, "regressor column names")->delimiter(',');
  cmd->add_option("--x-lags", o.x_lags, "per-regressor backshift lags")->delimiter(',');
}

struct ModelOptions {
  std::string family = "arma";
  int p = 0, q = 0, P = 0, Q = 0, s = 0, d_int = 0, D = 0;
};

void add_model_options(CLI::App* cmd, ModelOptions& o) {
  cmd->add_option("--family", o.family, "arma | arfima | artfima");
  cmd->add_option("--p", o.p, "AR order");
  cmd->add_option("--q", o.q, "MA order");
  cmd->add_option("--sP", o.P, "seasonal AR order");
  cmd->add_option("--sQ", o.Q, "seasonal MA order");
  cmd->add_option("--s", o.s, "seasonal period");
  cmd->add_option("--d-int", o.d_int, "integer differencing order");
  cmd->add_option("--sD", o.D, "seasonal differencing order");
}

dlr::ModelSpec to_spec(const ModelOptions& o, int m) {
  dlr::ModelSpec spec;
  spec.family = dlr::family_from_name(o.family);
  spec.p = o.p;
  spec.q = o.q;
  spec.P = o.P;
  spec.Q = o.Q;
  spec.s = o.s;
  spec.d_int = o.d_int;
  spec.D = o.D;
  spec.m = m;
  spec.validate();
  return spec;
}

// Fully specified process (orders implied by coefficient counts), used by the
// simulation/spectrum commands.
struct ProcessOptions {
  std::string family = "arma";
  int s = 0, d_int = 0, D = 0;
  std::vector<double> phi, psi, sphi, spsi, beta;
  double d = 0.0, lambda = 0.0, sigma2 = 1.0;
};

void add_process_options(CLI::App* cmd, ProcessOptions& o, const std::string& prefix,
                         bool with_beta) {
  auto name = [&prefix](const std::string& base) { return "--" + prefix + base; };
  cmd->add_option(name("family"), o.family, "arma | arfima | artfima");
  cmd->add_option(name("phi"), o.phi, "AR coefficients")->delimiter(',');
  cmd->add_option(name("psi"), o.psi, "MA coefficients")->delimiter(',');
  cmd->add_option(name("sphi"), o.sphi, "seasonal AR coefficients")->delimiter(',');
  cmd->add_option(name("spsi"), o.spsi, "seasonal MA coefficients")->delimiter(',');
  cmd->add_option(name("s"), o.s, "seasonal period");
  cmd->add_option(name("d-int"), o.d_int, "integer differencing order");
  cmd->add_option(name("sD"), o.D, "seasonal differencing order");
  cmd->add_option(name("d"), o.d, "fractional order d");
  cmd->add_option(name("lambda"), o.lambda, "tempering parameter");
  cmd->add_option(name("sigma2"), o.sigma2, "innovation variance");
  if (with_beta) cmd->add_option(name("beta"), o.beta, "regression coefficients")->delimiter(',');
}

std::pair<dlr::ModelSpec, dlr::ParamVector> build_process(const ProcessOptions& o) {
  dlr::ModelSpec spec;
  spec.family = dlr::family_from_name(o.family);
  spec.p = static_cast<int>(o.phi.size());
  spec.q = static_cast<int>(o.psi.size());
  spec.P = static_cast<int>(o.sphi.size());
  spec.Q = static_cast<int>(o.spsi.size());
  spec.s = o.s;
  spec.d_int = o.d_int;
  spec.D = o.D;
  spec.m = static_cast<int>(o.beta.size());
  spec.validate();
  dlr::ParamVector theta;
  theta.phi = o.phi;
  theta.psi = o.psi;
  theta.phi_star = o.sphi;
  theta.psi_star = o.spsi;
  theta.d_frac = o.d;
  theta.lambda = o.lambda;
  theta.sigma2_eps = o.sigma2;
  theta.beta = o.beta;
  dlr::to_unconstrained(theta, spec);  // stationarity/invertibility check at load time
  return {spec, theta};
}

struct SamplerOptions {
  int iters = 10000, burn = 3000, adapt_start = 200;
  double target = 0.234, rm_scale = 1.0, regularization = 1e-10, init_scale = -1.0;
  std::uint64_t seed = 1, stream = 0;
  int k_cut = 0, map_restarts = 8;
};

void add_sampler_options(CLI::App* cmd, SamplerOptions& o) {
  cmd->add_option("--iters", o.iters, "MCMC iterations");
  cmd->add_option("--burn", o.burn, "burn-in iterations");
  cmd->add_option("--adapt-start", o.adapt_start, "iteration to begin covariance adaptation");
  cmd->add_option("--target-accept", o.target, "Robbins-Monro acceptance target");
  cmd->add_option("--rm-scale", o.rm_scale, "Robbins-Monro gain scale");
  cmd->add_option("--regularization", o.regularization, "proposal covariance ridge");
  cmd->add_option("--init-scale", o.init_scale, "initial proposal scale (default 2.38^2/dim)");
  cmd->add_option("--seed", o.seed, "RNG seed");
  cmd->add_option("--stream", o.stream, "RNG stream");
  cmd->add_option("--k-cut", o.k_cut, "lowest Fourier ordinates to drop");
  cmd->add_option("--map-restarts", o.map_restarts, "extra optimizer start points");
}

dlr::SamplerSettings to_settings(const SamplerOptions& o) {
  dlr::SamplerSettings s;
  s.n_iter = o.iters;
  s.burn_in = o.burn;
  s.adapt_start = o.adapt_start;
  s.target_accept = o.target;
  s.rm_step_scale = o.rm_scale;
  s.regularization = o.regularization;
  s.init_scale = o.init_scale;
  s.seed = o.seed;
  s.stream = o.stream;
  s.validate();
  return s;
}

// --------------------------------------------------------------- utilities

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
}

void write_json_file(const fs::path& path, const ordered_json& j) {
  write_text(path, j.dump(2) + "\n");
}

// Minimal numeric-matrix CSV reader for artifacts this tool wrote itself.
struct MatrixCsv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
};

MatrixCsv read_matrix_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  MatrixCsv out;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("'" + path.string() + "' is empty");
  std::stringstream hs(line);
  std::string field;
  while (std::getline(hs, field, ',')) out.header.push_back(field);
  out.columns.resize(out.header.size());
  int row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++row;
    std::stringstream ls(line);
    std::size_t col = 0;
    while (std::getline(ls, field, ',')) {
      if (col >= out.columns.size())
        throw std::runtime_error("'" + path.string() + "': extra field in row " +
                                 std::to_string(row));
      out.columns[col++].push_back(std::stod(field));
    }
    if (col != out.columns.size())
      throw std::runtime_error("'" + path.string() + "': short row " + std::to_string(row));
  }
  return out;
}

const std::vector<double>& named_column(const MatrixCsv& csv, const std::string& name) {
  for (std::size_t j = 0; j < csv.header.size(); ++j)
    if (csv.header[j] == name) return csv.columns[j];
  throw std::runtime_error("column '" + name + "' missing");
}

ordered_json named_values(const std::vector<std::string>& names, const Eigen::VectorXd& values) {
  ordered_json j = ordered_json::object();
  for (std::size_t i = 0; i < names.size(); ++i) j[names[i]] = values[static_cast<int>(i)];
  return j;
}

void write_posterior_csv(const fs::path& path, const dlr::ModelSpec& spec,
                         const dlr::ChainResult& chain) {
  const auto names = dlr::natural_names(spec);
  const int n = chain.n_kept();
  std::vector<std::string> header{"iter", "log_post"};
  header.insert(header.end(), names.begin(), names.end());
  std::vector<std::vector<double>> cols(header.size(), std::vector<double>(n));
  for (int i = 0; i < n; ++i) {
    cols[0][i] = i;
    cols[1][i] = chain.log_post[i];
    const dlr::ParamVector theta =
        dlr::to_natural(dlr::unpack(chain.draws.row(i).transpose(), spec), spec);
    const Eigen::VectorXd nat = dlr::pack_natural(theta, spec);
    for (int c = 0; c < nat.size(); ++c) cols[2 + c][i] = nat[c];
  }
  dlr::write_csv(path.string(), header, cols);
}

ordered_json chain_diagnostics(const dlr::ModelSpec& spec, const dlr::ChainResult& chain) {
  ordered_json j;
  j["n_kept"] = chain.n_kept();
  j["accept_rate"] = chain.accept_rate;
  j["proposal_scale_final"] = chain.scale_final;
  const auto names = dlr::natural_names(spec);
  ordered_json ess = ordered_json::object();
  double ess_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < chain.ess.size(); ++i) {
    ess[names[i]] = chain.ess[i];
    ess_min = std::min(ess_min, chain.ess[i]);
  }
  j["ess"] = ess;
  j["ess_min"] = ess_min;
  return j;
}

Eigen::MatrixXd draws_from_posterior_csv(const fs::path& path, const dlr::ModelSpec& spec) {
  const MatrixCsv csv = read_matrix_csv(path);
  const auto names = dlr::natural_names(spec);
  std::vector<const std::vector<double>*> cols;
  for (const auto& name : names) cols.push_back(&named_column(csv, name));
  const int n = static_cast<int>(cols.front()->size());
  Eigen::MatrixXd draws(n, spec.dim());
  Eigen::VectorXd nat(spec.dim());
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < spec.dim(); ++c) nat[c] = (*cols[c])[i];
    const dlr::ParamVector theta = dlr::unpack_natural(nat, spec);
    draws.row(i) = dlr::pack(dlr::to_unconstrained(theta, spec), spec).transpose();
  }
  return draws;
}

int execute(CLI::App& app, const std::string& command, const std::string& out_dir,
            const std::function<void(ordered_json&)>& body) {
  fs::create_directories(out_dir);
  const fs::path out(out_dir);
  write_json_file(out / "status.json",
                  {{"status", "incomplete"}, {"command", command}});
  // Echo only the options that were explicitly set: unset options round-trip
  // badly (empty strings reparse as zeros) and the compiled-in defaults are
  // identical on a rerun anyway.
  write_text(out / "config.echo", app.config_to_str(false, true));
  const auto t0 = std::chrono::steady_clock::now();
  try {
    ordered_json diag;
    diag["command"] = command;
    body(diag);
    diag["elapsed_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_json_file(out / "diagnostics.json", diag);
    write_json_file(out / "status.json", {{"status", "ok"}, {"command", command}});
    return 0;
  } catch (const std::exception& e) {
    write_json_file(out / "status.json",
                    {{"status", "error"}, {"command", command}, {"message", e.what()}});
    std::cerr << "error (" << command << "): " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian dynamic linear regression with ARMA/ARFIMA/ARTFIMA errors"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from a configuration file");
  app.allow_config_extras(false);

  std::string out_dir = "run";
  app.add_option("--out", out_dir, "run directory for artifacts")->capture_default_str();

  // ---- fit ----------------------------------------------------------------
  auto* fit_cmd = app.add_subcommand("fit", "sample the Whittle posterior");
  fit_cmd->fallthrough();
  DataOptions fit_data;
  ModelOptions fit_model_opts;
  SamplerOptions fit_sampler;
  add_data_options(fit_cmd, fit_data);
  add_model_options(fit_cmd, fit_model_opts);
  add_sampler_options(fit_cmd, fit_sampler);

  // ---- forecast -----------------------------------------------------------
  auto* forecast_cmd =
      app.add_subcommand("forecast", "posterior-predictive forecasts from a fitted run");
  forecast_cmd->fallthrough();
  DataOptions fc_data;
  ModelOptions fc_model_opts;
  std::string fc_future_path;
  int fc_h_max = 1, fc_M = 900, fc_window = -1;
  double fc_level = 0.95;
  std::uint64_t fc_seed = 1, fc_stream = 0;
  add_data_options(forecast_cmd, fc_data);
  add_model_options(forecast_cmd, fc_model_opts);
  forecast_cmd->add_option("--future-data", fc_future_path,
                           "CSV with future regressor rows (required when regressors exist)");
  forecast_cmd->add_option("--h-max", fc_h_max, "forecast horizon")->required();
  forecast_cmd->add_option("--draws", fc_M, "predictive mixture size");
  forecast_cmd->add_option("--window", fc_window, "conditioning window (default min(T, 2048))");
  forecast_cmd->add_option("--level", fc_level, "interval coverage level");
  forecast_cmd->add_option("--seed", fc_seed, "RNG seed");
  forecast_cmd->add_option("--stream", fc_stream, "RNG stream");

  // ---- evaluate -----------------------------------------------------------
  auto* eval_cmd = app.add_subcommand("evaluate", "rolling-origin forecast evaluation");
  eval_cmd->fallthrough();
  DataOptions ev_data;
  ModelOptions ev_model_opts;
  SamplerOptions ev_sampler;
  int ev_train_T = 0, ev_k = 0, ev_h_max = 1, ev_M = 900, ev_window = -1;
  bool ev_fit_once = false;
  add_data_options(eval_cmd, ev_data);
  add_model_options(eval_cmd, ev_model_opts);
  add_sampler_options(eval_cmd, ev_sampler);
  eval_cmd->add_option("--train-T", ev_train_T, "training window length")->required();
  eval_cmd->add_option("--k", ev_k, "number of rolling origins")->required();
  eval_cmd->add_option("--h-max", ev_h_max, "maximum horizon");
  eval_cmd->add_option("--draws", ev_M, "predictive mixture size");
  eval_cmd->add_option("--window", ev_window, "forecast conditioning window");
  eval_cmd->add_flag("--fit-once", ev_fit_once, "estimate on the first window only");

  // ---- simulate -----------------------------------------------------------
  auto* sim_cmd = app.add_subcommand("simulate", "draw a synthetic dataset");
  sim_cmd->fallthrough();
  ProcessOptions sim_err, sim_x;
  int sim_T = 0;
  std::uint64_t sim_seed = 1;
  add_process_options(sim_cmd, sim_err, "", true);
  add_process_options(sim_cmd, sim_x, "x-", false);
  sim_cmd->add_option("--T", sim_T, "series length")->required();
  sim_cmd->add_option("--seed", sim_seed, "RNG seed");

  // ---- qq-experiment ------------------------------------------------------
  auto* qq_cmd = app.add_subcommand(
      "qq-experiment", "periodogram-ratio distribution check at the lowest frequencies");
  qq_cmd->fallthrough();
  ProcessOptions qq_err, qq_x;
  int qq_T = 1001, qq_reps = 2000, qq_nfreq = 8;
  bool qq_fixed_beta = false;
  std::uint64_t qq_seed = 1;
  add_process_options(qq_cmd, qq_err, "", true);
  add_process_options(qq_cmd, qq_x, "x-", false);
  qq_cmd->add_option("--T", qq_T, "series length per replication");
  qq_cmd->add_option("--reps", qq_reps, "number of replications");
  qq_cmd->add_option("--n-freqs", qq_nfreq, "lowest frequencies to track");
  qq_cmd->add_flag("--fixed-beta", qq_fixed_beta, "use the true coefficients instead of MAP");
  qq_cmd->add_option("--seed", qq_seed, "RNG seed");

  // ---- compare ------------------------------------------------------------
  auto* cmp_cmd =
      app.add_subcommand("compare", "fit under Whittle/Gaussian/Kalman likelihoods and time them");
  cmp_cmd->fallthrough();
  DataOptions cmp_data;
  ModelOptions cmp_model_opts;
  SamplerOptions cmp_sampler;
  add_data_options(cmp_cmd, cmp_data);
  add_model_options(cmp_cmd, cmp_model_opts);
  add_sampler_options(cmp_cmd, cmp_sampler);

  // ---- spectrum -----------------------------------------------------------
  auto* spec_cmd = app.add_subcommand("spectrum", "tabulate the model spectral density");
  spec_cmd->fallthrough();
  ProcessOptions sp_proc;
  int sp_n = 512;
  add_process_options(spec_cmd, sp_proc, "", false);
  spec_cmd->add_option("--n-grid", sp_n, "number of grid frequencies");

  // ---- periodogram --------------------------------------------------------
  auto* per_cmd = app.add_subcommand("periodogram", "pseudo-data periodogram of a dataset");
  per_cmd->fallthrough();
  DataOptions per_data;
  std::vector<double> per_beta;
  add_data_options(per_cmd, per_data);
  per_cmd->add_option("--beta", per_beta, "regression coefficients (default zero)")
      ->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  if (fit_cmd->parsed()) {
    return execute(app, "fit", out_dir, [&](ordered_json& diag) {
      const dlr::Dataset ds = dlr::load_csv(fit_data.path, fit_data.y_col, fit_data.x_cols,
                                            fit_data.x_lags);
      const dlr::ModelSpec spec = to_spec(fit_model_opts, ds.m());
      const dlr::DftCache cache = dlr::precompute_dft(ds.y, ds.X);
      dlr::FitConfig fc;
      fc.sampler = to_settings(fit_sampler);
      fc.k_cut = fit_sampler.k_cut;
      fc.map_restarts = fit_sampler.map_restarts;
      const dlr::FitResult fr = dlr::fit_model(cache, spec, fc);
      write_posterior_csv(fs::path(out_dir) / "posterior.csv", spec, fr.chain);
      diag["data"] = {{"T", ds.T()}, {"m", ds.m()}, {"transform", ds.transform_log}};
      diag["chain"] = chain_diagnostics(spec, fr.chain);
      diag["map"] = {{"searched", fr.map_searched},
                     {"log_posterior", fr.map.value},
                     {"hessian_pd", fr.map.hessian_pd}};
      diag["posterior_mean"] =
          named_values(dlr::natural_names(spec), fr.posterior_mean_natural);
      const dlr::DicResult d = dlr::dic(cache, spec, fr.chain, fit_sampler.k_cut);
      diag["dic"] = {{"dic", d.dic},
                     {"mean_deviance", d.d_bar},
                     {"p_d", d.p_d},
                     {"plugin", "natural-space posterior mean"},
                     {"plugin_valid", d.theta_star_valid}};
    });
  }

  if (forecast_cmd->parsed()) {
    return execute(app, "forecast", out_dir, [&](ordered_json& diag) {
      const dlr::Dataset ds =
          dlr::load_csv(fc_data.path, fc_data.y_col, fc_data.x_cols, fc_data.x_lags);
      const dlr::ModelSpec spec = to_spec(fc_model_opts, ds.m());
      const Eigen::MatrixXd draws =
          draws_from_posterior_csv(fs::path(out_dir) / "posterior.csv", spec);
      std::vector<std::vector<double>> x_future(ds.m());
      if (ds.m() > 0) {
        if (fc_future_path.empty())
          throw std::runtime_error("forecast: --future-data required when regressors exist");
        const MatrixCsv fut = read_matrix_csv(fc_future_path);
        for (int j = 0; j < ds.m(); ++j) {
          x_future[j] = named_column(fut, ds.x_names[j]);
          if (static_cast<int>(x_future[j].size()) < fc_h_max)
            throw std::runtime_error("forecast: future data shorter than h_max");
        }
      }
      dlr::ForecastConfig cfg;
      cfg.h_max = fc_h_max;
      cfg.n_draws = fc_M;
      cfg.window_W = fc_window;
      cfg.quantile_levels = {(1.0 - fc_level) / 2.0, 0.5, (1.0 + fc_level) / 2.0};
      cfg.seed = fc_seed;
      cfg.stream = fc_stream;
      const dlr::PredictiveResult pred =
          dlr::posterior_predictive(ds.y, ds.X, x_future, spec, draws, cfg);
      std::vector<std::vector<double>> cols(5, std::vector<double>(fc_h_max));
      for (int h = 0; h < fc_h_max; ++h) {
        cols[0][h] = h + 1;
        cols[1][h] = pred.point[h];
        cols[2][h] = pred.quantiles(0, h);
        cols[3][h] = pred.quantiles(1, h);
        cols[4][h] = pred.quantiles(2, h);
      }
      dlr::write_csv((fs::path(out_dir) / "forecast.csv").string(),
                     {"h", "point", "lo", "median", "hi"}, cols);
      diag["n_components"] = pred.n_components;
      diag["n_failed_draws"] = pred.n_failed_draws;
      diag["interval_level"] = fc_level;
    });
  }

  if (eval_cmd->parsed()) {
    return execute(app, "evaluate", out_dir, [&](ordered_json& diag) {
      const dlr::Dataset ds =
          dlr::load_csv(ev_data.path, ev_data.y_col, ev_data.x_cols, ev_data.x_lags);
      const dlr::ModelSpec spec = to_spec(ev_model_opts, ds.m());
      dlr::CvConfig cv;
      cv.train_T = ev_train_T;
      cv.k = ev_k;
      cv.h_max = ev_h_max;
      cv.window_W = ev_window;
      cv.n_draws = ev_M;
      cv.k_cut = ev_sampler.k_cut;
      cv.refit_each_window = !ev_fit_once;
      cv.map_restarts = ev_sampler.map_restarts;
      cv.sampler = to_settings(ev_sampler);
      const dlr::CvResult r = dlr::rolling_cv(ds.y, ds.X, spec, cv);
      std::vector<std::vector<double>> cols(5, std::vector<double>(ev_h_max));
      for (int h = 0; h < ev_h_max; ++h) {
        cols[0][h] = h + 1;
        cols[1][h] = r.lpds[h];
        cols[2][h] = r.rmse[h];
        cols[3][h] = r.crps[h];
        cols[4][h] = r.n_points[h];
      }
      dlr::write_csv((fs::path(out_dir) / "metrics_h.csv").string(),
                     {"h", "neg_lpds", "rmse", "crps", "n_points"}, cols);
      diag["n_skipped_windows"] = r.n_skipped_windows;
      diag["n_dropped_densities"] = r.n_dropped_densities;
      diag["warnings"] = r.warnings;
      diag["estimation"] = ev_fit_once ? "fit-once" : "refit-per-window";
    });
  }

  if (sim_cmd->parsed()) {
    return execute(app, "simulate", out_dir, [&](ordered_json& diag) {
      const auto [err_spec, err_params] = build_process(sim_err);
      dlr::ModelSpec x_spec;
      dlr::ParamVector x_params;
      if (err_spec.m > 0) std::tie(x_spec, x_params) = build_process(sim_x);
      const dlr::DlrSimResult sim =
          dlr::simulate_dlr(err_spec, err_params, x_spec, x_params, sim_T, sim_seed);
      std::vector<std::string> header{"t", "y"};
      std::vector<std::vector<double>> cols;
      std::vector<double> ticks(sim_T);
      for (int t = 0; t < sim_T; ++t) ticks[t] = t + 1;
      cols.push_back(ticks);
      cols.push_back(sim.y);
      for (int j = 0; j < err_spec.m; ++j) {
        header.push_back("x" + std::to_string(j + 1));
        cols.push_back(sim.X[j]);
      }
      header.push_back("eta");
      cols.push_back(sim.eta);
      dlr::write_csv((fs::path(out_dir) / "data.csv").string(), header, cols);
      diag["T"] = sim_T;
      diag["m"] = err_spec.m;
    });
  }

  if (qq_cmd->parsed()) {
    return execute(app, "qq-experiment", out_dir, [&](ordered_json& diag) {
      dlr::QqExperimentConfig cfg;
      std::tie(cfg.error_spec, cfg.error_params) = build_process(qq_err);
      if (cfg.error_spec.m == 0)
        throw std::runtime_error("qq-experiment: provide --beta (at least one regressor)");
      std::tie(cfg.x_spec, cfg.x_params) = build_process(qq_x);
      cfg.T = qq_T;
      cfg.n_replications = qq_reps;
      cfg.n_freqs_report = qq_nfreq;
      cfg.estimate_beta = !qq_fixed_beta;
      cfg.seed = qq_seed;
      const dlr::QqExperimentResult res = dlr::periodogram_ratio_experiment(cfg);
      const int R = static_cast<int>(res.ratios.rows());
      const int K = static_cast<int>(res.omegas.size());
      std::vector<std::vector<double>> cols(5);
      for (int k = 0; k < K; ++k) {
        std::vector<double> sorted(R);
        for (int r = 0; r < R; ++r) sorted[r] = res.ratios(r, k);
        std::sort(sorted.begin(), sorted.end());
        for (int r = 0; r < R; ++r) {
          cols[0].push_back(k + 1);
          cols[1].push_back(res.omegas[k]);
          cols[2].push_back(r + 1);
          cols[3].push_back(sorted[r]);
          cols[4].push_back(-std::log1p(-(r + 0.5) / R));
        }
      }
      dlr::write_csv((fs::path(out_dir) / "qq_ratios.csv").string(),
                     {"freq_index", "omega", "order_stat", "ratio", "exp_quantile"}, cols);
      ordered_json ks = ordered_json::array();
      for (int k = 0; k < K; ++k)
        ks.push_back({{"freq_index", k + 1},
                      {"omega", res.omegas[k]},
                      {"statistic", res.ks[k].statistic},
                      {"p_value", res.ks[k].p_value}});
      diag["ks_exponential"] = ks;
      diag["replications"] = R;
      diag["beta_estimated"] = !qq_fixed_beta;
    });
  }

  if (cmp_cmd->parsed()) {
    return execute(app, "compare", out_dir, [&](ordered_json& diag) {
      const dlr::Dataset ds =
          dlr::load_csv(cmp_data.path, cmp_data.y_col, cmp_data.x_cols, cmp_data.x_lags);
      const dlr::ModelSpec spec = to_spec(cmp_model_opts, ds.m());
      const auto t_cache0 = std::chrono::steady_clock::now();
      const dlr::DftCache cache = dlr::precompute_dft(ds.y, ds.X);
      const double cache_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_cache0)
              .count();

      dlr::FitConfig fc;
      fc.sampler = to_settings(cmp_sampler);
      fc.k_cut = cmp_sampler.k_cut;
      fc.map_restarts = cmp_sampler.map_restarts;
      const dlr::FitResult whittle_fit = dlr::fit_model(cache, spec, fc);
      write_posterior_csv(fs::path(out_dir) / "posterior_whittle.csv", spec, whittle_fit.chain);

      struct Entry {
        std::string name;
        dlr::LogDensityFn log_post;
      };
      std::vector<Entry> entries;
      entries.push_back({"gaussian", dlr::make_log_posterior_time_domain(
                                         ds.y, ds.X, spec, dlr::LikelihoodKind::gaussian)});
      if (spec.family == dlr::Family::arma)
        entries.push_back({"kalman", dlr::make_log_posterior_time_domain(
                                         ds.y, ds.X, spec, dlr::LikelihoodKind::kalman)});

      ordered_json table = ordered_json::object();
      const auto names = dlr::natural_names(spec);
      auto time_evals = [&](const dlr::LogDensityFn& f, const Eigen::VectorXd& at, int reps) {
        volatile double sink = 0.0;
        const auto t0 = std::chrono::steady_clock::now();
        for (int i = 0; i < reps; ++i) sink = f(at);
        (void)sink;
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                   .count() /
               reps;
      };
      const dlr::LogDensityFn whittle_post = dlr::make_log_posterior(cache, spec, cmp_sampler.k_cut);
      table["whittle"] = chain_diagnostics(spec, whittle_fit.chain);
      table["whittle"]["posterior_mean"] =
          named_values(names, whittle_fit.posterior_mean_natural);
      table["whittle"]["per_eval_ms"] = time_evals(whittle_post, whittle_fit.map.point, 20);
      table["whittle"]["cache_build_ms"] = cache_ms;

      for (const auto& entry : entries) {
        const dlr::ChainResult chain = dlr::run_adaptive_mh(
            entry.log_post, whittle_fit.map.point, fc.sampler, whittle_fit.map.cov_seed);
        write_posterior_csv(fs::path(out_dir) / ("posterior_" + entry.name + ".csv"), spec,
                            chain);
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(spec.dim());
        for (int i = 0; i < chain.n_kept(); ++i)
          mean += dlr::pack_natural(
              dlr::to_natural(dlr::unpack(chain.draws.row(i).transpose(), spec), spec), spec);
        mean /= std::max(1, chain.n_kept());
        table[entry.name] = chain_diagnostics(spec, chain);
        table[entry.name]["posterior_mean"] = named_values(names, mean);
        table[entry.name]["per_eval_ms"] = time_evals(entry.log_post, whittle_fit.map.point, 3);
      }
      diag["likelihoods"] = table;
    });
  }

  if (spec_cmd->parsed()) {
    return execute(app, "spectrum", out_dir, [&](ordered_json& diag) {
      const auto [proc_spec, proc_params] = build_process(sp_proc);
      const dlr::SpectrumGrid grid = dlr::spectrum_grid(proc_params, proc_spec, sp_n);
      dlr::write_csv((fs::path(out_dir) / "spectrum.csv").string(), {"omega", "density"},
                     {grid.omegas, grid.values});
      diag["n_grid"] = sp_n;
    });
  }

  if (per_cmd->parsed()) {
    return execute(app, "periodogram", out_dir, [&](ordered_json& diag) {
      const dlr::Dataset ds =
          dlr::load_csv(per_data.path, per_data.y_col, per_data.x_cols, per_data.x_lags);
      std::vector<double> beta = per_beta;
      if (beta.empty()) beta.assign(ds.m(), 0.0);
      if (static_cast<int>(beta.size()) != ds.m())
        throw std::runtime_error("periodogram: beta length must match regressor count");
      const dlr::DftCache cache = dlr::precompute_dft(ds.y, ds.X);
      const auto J_z = dlr::pseudo_dft(cache, beta);
      const auto I_z = dlr::periodogram(J_z, cache.T);
      dlr::write_csv((fs::path(out_dir) / "periodogram.csv").string(), {"omega", "intensity"},
                     {cache.omegas, I_z});
      diag["T"] = ds.T();
      diag["n_frequencies"] = cache.K();
    });
  }

  return 0;
}
