#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "dlr/model.hpp"
#include "dlr/sampler.hpp"

using namespace dlr;

namespace {

ModelSpec arma_spec(int p, int q, int m = 0) {
  ModelSpec s;
  s.family = Family::arma;
  s.p = p;
  s.q = q;
  s.m = m;
  return s;
}

}  // namespace

TEST_CASE("pacf_to_ar matches the hand-run Durbin-Levinson recursion") {
  // k=3 worked example: (0.4, -0.2, 0.1) -> (0.5, -0.248, 0.1).
  auto phi = pacf_to_ar({0.4, -0.2, 0.1});
  REQUIRE(phi.size() == 3);
  CHECK(phi[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(phi[1] == doctest::Approx(-0.248).epsilon(1e-12));
  CHECK(phi[2] == doctest::Approx(0.1).epsilon(1e-12));

  auto phi2 = pacf_to_ar({0.3, 0.5});
  CHECK(phi2[0] == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(phi2[1] == doctest::Approx(0.5).epsilon(1e-12));

  // p = 1 is the identity.
  CHECK(pacf_to_ar({-0.7})[0] == doctest::Approx(-0.7).epsilon(1e-15));
}

TEST_CASE("ar_to_pacf inverts pacf_to_ar") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> unif(-0.95, 0.95);
  for (int p = 1; p <= 6; ++p) {
    for (int rep = 0; rep < 25; ++rep) {
      std::vector<double> pacf(p);
      for (auto& r : pacf) r = unif(rng);
      auto phi = pacf_to_ar(pacf);
      auto back = ar_to_pacf(phi);
      REQUIRE(back.size() == pacf.size());
      for (int i = 0; i < p; ++i) CHECK(back[i] == doctest::Approx(pacf[i]).epsilon(1e-10));
    }
  }
}

TEST_CASE("pacf maps reject out-of-range and non-stationary inputs") {
  CHECK_THROWS_AS((void)pacf_to_ar({1.0}), std::domain_error);
  CHECK_THROWS_AS((void)pacf_to_ar({0.2, -1.3}), std::domain_error);
  // AR(1) with phi = 1.2 has a root inside the unit circle.
  CHECK_THROWS_AS((void)ar_to_pacf({1.2}), std::domain_error);
  // phi(z) = 1 - 1.9 z + 0.95 z^2 is stationary; 1 - 2.0 z + 0.9 z^2 is not.
  CHECK_NOTHROW((void)ar_to_pacf({1.9, -0.95}));
  CHECK_THROWS_AS((void)ar_to_pacf({2.0, -0.9}), std::domain_error);
}

TEST_CASE("MA reparameterisation is the identity at q = 1 and inverts exactly") {
  CHECK(ma_pacf_to_coef({0.37})[0] == doctest::Approx(0.37).epsilon(1e-14));
  CHECK(ma_coef_to_pacf({-0.6})[0] == doctest::Approx(-0.6).epsilon(1e-14));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(-0.9, 0.9);
  for (int q = 1; q <= 5; ++q) {
    for (int rep = 0; rep < 25; ++rep) {
      std::vector<double> pacf(q);
      for (auto& r : pacf) r = unif(rng);
      auto psi = ma_pacf_to_coef(pacf);
      auto back = ma_coef_to_pacf(psi);
      for (int i = 0; i < q; ++i) CHECK(back[i] == doctest::Approx(pacf[i]).epsilon(1e-10));
      // Invertibility: 1 + sum psi_j z^j must have roots outside the unit
      // circle, equivalently -psi must be a stationary AR vector.
      std::vector<double> neg(psi.size());
      for (std::size_t i = 0; i < psi.size(); ++i) neg[i] = -psi[i];
      CHECK_NOTHROW((void)ar_to_pacf(neg));
    }
  }
}

TEST_CASE("unconstrained transform round trips across families") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(-0.85, 0.85);

  for (int famcase = 0; famcase < 3; ++famcase) {
    ModelSpec spec;
    spec.family = famcase == 0 ? Family::arma : (famcase == 1 ? Family::arfima : Family::artfima);
    spec.p = 2;
    spec.q = 1;
    spec.P = 1;
    spec.Q = 1;
    spec.s = 4;
    spec.m = 2;
    spec.validate();

    for (int rep = 0; rep < 20; ++rep) {
      UnconstrainedParams u;
      u.phi_raw = {std::atanh(unif(rng)), std::atanh(unif(rng))};
      u.psi_raw = {std::atanh(unif(rng))};
      u.phi_star_raw = {std::atanh(unif(rng))};
      u.psi_star_raw = {std::atanh(unif(rng))};
      u.d_raw = unif(rng);
      u.log_lambda = unif(rng);
      u.log_sigma2 = unif(rng);
      u.beta = {unif(rng) * 5, unif(rng) * 5};

      ParamVector theta = to_natural(u, spec);
      UnconstrainedParams back = to_unconstrained(theta, spec);
      for (int i = 0; i < spec.p; ++i)
        CHECK(back.phi_raw[i] == doctest::Approx(u.phi_raw[i]).epsilon(1e-10));
      for (int i = 0; i < spec.q; ++i)
        CHECK(back.psi_raw[i] == doctest::Approx(u.psi_raw[i]).epsilon(1e-10));
      for (int i = 0; i < spec.P; ++i)
        CHECK(back.phi_star_raw[i] == doctest::Approx(u.phi_star_raw[i]).epsilon(1e-10));
      for (int i = 0; i < spec.Q; ++i)
        CHECK(back.psi_star_raw[i] == doctest::Approx(u.psi_star_raw[i]).epsilon(1e-10));
      if (spec.has_frac()) CHECK(back.d_raw == doctest::Approx(u.d_raw).epsilon(1e-10));
      if (spec.has_lambda())
        CHECK(back.log_lambda == doctest::Approx(u.log_lambda).epsilon(1e-10));
      CHECK(back.log_sigma2 == doctest::Approx(u.log_sigma2).epsilon(1e-10));
      for (int k = 0; k < spec.m; ++k)
        CHECK(back.beta[k] == doctest::Approx(u.beta[k]).epsilon(1e-10));
    }
  }
}

TEST_CASE("fractional order maps through the scaled Fisher transform for ARFIMA") {
  ModelSpec spec;
  spec.family = Family::arfima;
  ParamVector theta;
  theta.d_frac = 0.493;
  theta.sigma2_eps = 1.0;
  UnconstrainedParams u = to_unconstrained(theta, spec);
  // arctanh(2 * 0.493) = arctanh(0.986)
  CHECK(u.d_raw == doctest::Approx(2.4774102574949293).epsilon(1e-12));
  ParamVector back = to_natural(u, spec);
  CHECK(back.d_frac == doctest::Approx(0.493).epsilon(1e-12));
  // |d| < 0.5 always after the inverse map, even for extreme raw values.
  u.d_raw = 40.0;
  CHECK(std::abs(to_natural(u, spec).d_frac) < 0.5);

  // ARTFIMA uses the identity map: d is unrestricted.
  ModelSpec tspec;
  tspec.family = Family::artfima;
  UnconstrainedParams ut;
  ut.d_raw = 2.139;
  ut.log_lambda = std::log(0.616);
  CHECK(to_natural(ut, tspec).d_frac == doctest::Approx(2.139).epsilon(1e-14));
  CHECK(to_natural(ut, tspec).lambda == doctest::Approx(0.616).epsilon(1e-12));
}

TEST_CASE("log_prior matches an independent density computation") {
  // ARMA(1,0) with one regressor: Uniform(-1,1) on the partial autocorrelation
  // (tanh Jacobian), N(0,100) on log sigma2 and on beta.
  ModelSpec spec = arma_spec(1, 0, 1);
  UnconstrainedParams u;
  u.phi_raw = {0.7};
  u.log_sigma2 = 0.3;
  u.beta = {2.5};

  auto norm_logpdf = [](double x, double var) {
    return -0.5 * std::log(2.0 * M_PI * var) - 0.5 * x * x / var;
  };
  double t = std::tanh(0.7);
  double expected = std::log(0.5) + std::log1p(-t * t)  // Uniform(-1,1) + Jacobian
                    + norm_logpdf(0.3, 100.0) + norm_logpdf(2.5, 100.0);
  CHECK(log_prior(u, spec) == doctest::Approx(expected).epsilon(1e-12));

  // Symmetric in the sign of the pacf coordinate.
  UnconstrainedParams v = u;
  v.phi_raw[0] = -0.7;
  CHECK(log_prior(v, spec) == doctest::Approx(log_prior(u, spec)).epsilon(1e-14));

  // ARFIMA adds a standard normal on arctanh(2d); ARTFIMA a standard normal
  // on d itself plus N(0,100) on log lambda.
  ModelSpec fspec;
  fspec.family = Family::arfima;
  UnconstrainedParams uf;
  uf.d_raw = 0.4;
  uf.log_sigma2 = -0.2;
  double expected_f = norm_logpdf(0.4, 1.0) + norm_logpdf(-0.2, 100.0);
  CHECK(log_prior(uf, fspec) == doctest::Approx(expected_f).epsilon(1e-12));

  ModelSpec tspec;
  tspec.family = Family::artfima;
  UnconstrainedParams ut;
  ut.d_raw = 1.1;
  ut.log_lambda = -0.5;
  ut.log_sigma2 = 0.0;
  double expected_t = norm_logpdf(1.1, 1.0) + norm_logpdf(-0.5, 100.0) + norm_logpdf(0.0, 100.0);
  CHECK(log_prior(ut, tspec) == doctest::Approx(expected_t).epsilon(1e-12));
}

TEST_CASE("pack and unpack round trip in both coordinate systems") {
  ModelSpec spec;
  spec.family = Family::artfima;
  spec.p = 1;
  spec.q = 2;
  spec.P = 1;
  spec.Q = 1;
  spec.s = 12;
  spec.m = 2;
  REQUIRE(spec.dim() == 1 + 2 + 1 + 1 + 1 + 1 + 1 + 2);

  UnconstrainedParams u;
  u.phi_raw = {0.2};
  u.psi_raw = {-0.3, 0.1};
  u.phi_star_raw = {0.5};
  u.psi_star_raw = {-0.4};
  u.d_raw = 0.9;
  u.log_lambda = -1.2;
  u.log_sigma2 = 0.6;
  u.beta = {1.5, -2.5};

  Eigen::VectorXd v = pack(u, spec);
  REQUIRE(v.size() == spec.dim());
  // Packing order: [phi, psi, phi*, psi*, d, lambda, sigma2, beta].
  CHECK(v[0] == 0.2);
  CHECK(v[2] == 0.1);
  CHECK(v[5] == 0.9);
  CHECK(v[6] == -1.2);
  CHECK(v[7] == 0.6);
  CHECK(v[9] == -2.5);
  UnconstrainedParams back = unpack(v, spec);
  CHECK(pack(back, spec) == v);

  ParamVector theta = to_natural(u, spec);
  Eigen::VectorXd nat = pack_natural(theta, spec);
  ParamVector theta_back = unpack_natural(nat, spec);
  CHECK(pack_natural(theta_back, spec) == nat);

  auto names = natural_names(spec);
  REQUIRE(static_cast<int>(names.size()) == spec.dim());
  CHECK(names[0] == "phi_1");
  CHECK(names[1] == "psi_1");
  CHECK(names[3] == "sphi_1");
  CHECK(names[4] == "spsi_1");
  CHECK(names[5] == "d");
  CHECK(names[6] == "lambda");
  CHECK(names[7] == "sigma2");
  CHECK(names[8] == "beta_1");
  CHECK(names[9] == "beta_2");
}

TEST_CASE("spec validation rejects inconsistent orders") {
  ModelSpec bad = arma_spec(1, 1);
  bad.P = 1;  // seasonal order without a period
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
  bad.s = 1;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
  bad.s = 4;
  CHECK_NOTHROW(bad.validate());

  ModelSpec neg = arma_spec(-1, 0);
  CHECK_THROWS_AS(neg.validate(), std::domain_error);
}

TEST_CASE("difference applies ordinary and seasonal operators") {
  // (1 - B) of a linear ramp is constant.
  std::vector<double> ramp = {1, 2, 3, 4, 5, 6, 7, 8};
  auto d1 = difference(ramp, 1, 0, 0);
  REQUIRE(d1.size() == 7);
  for (double v : d1) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));

  // (1 - B^3) of a period-3 signal vanishes.
  std::vector<double> seasonal = {2, 5, -1, 2, 5, -1, 2, 5, -1};
  auto ds = difference(seasonal, 0, 1, 3);
  REQUIRE(ds.size() == 6);
  for (double v : ds) CHECK(v == doctest::Approx(0.0).epsilon(1e-15));

  // Combined operator shrinks by d_int + D*s.
  auto both = difference(seasonal, 1, 1, 3);
  CHECK(both.size() == 9 - 1 - 3);

  CHECK_THROWS_AS((void)difference(std::vector<double>{1.0, 2.0}, 2, 0, 0), std::domain_error);
}
