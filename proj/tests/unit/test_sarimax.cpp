#include <doctest.h>

#include <cmath>

#include "oeecast/errors.hpp"
#include "oeecast/sarimax.hpp"
#include "oeecast/series.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace oeecast;
using testutil::spec;

namespace {

FeatureMatrix column(const std::string& name, const std::vector<double>& v) {
  FeatureMatrix fm({name});
  for (std::size_t i = 0; i < v.size(); ++i) fm.append_row(i, std::span<const double>(&v[i], 1));
  return fm;
}

}  // namespace

TEST_CASE("spec parsing and labels") {
  const auto s = sarimax::parse_spec("(4,0,0)(1,0,1)_8");
  CHECK(s.p == 4);
  CHECK(s.Q == 1);
  CHECK(s.s == 8);
  CHECK(s.label() == "(4,0,0)(1,0,1)_8");
  CHECK(sarimax::parse_spec("2,0,0,2,0,1,8").P == 2);
  CHECK_THROWS(sarimax::parse_spec("(4,0,0)"));
  CHECK_THROWS_AS(sarimax::fit(testutil::gaussian(500, 1), spec(9, 0, 0, 0, 1)), InvalidArgument);
}

TEST_CASE("AR(1) with one exogenous regressor") {
  const auto x = testutil::gaussian(2000, 100);
  const auto exog = column("x", x);
  sarimax::SarimaxParams p;
  p.ar = {0.6};
  p.exog_beta = {2.0};
  const auto y = sarimax::simulate(spec(1, 0, 0, 0, 1), p, 2000, 7, exog);
  const auto f = sarimax::fit(y, spec(1, 0, 0, 0, 1), exog);
  CHECK(f.ar[0] > 0.5);
  CHECK(f.ar[0] < 0.7);
  CHECK(f.exog_beta_raw()[0] > 1.9);
  CHECK(f.exog_beta_raw()[0] < 2.1);
  CHECK(f.exog_p_values()[0] < 0.01);
  CHECK(f.stderr_available);
  CHECK(f.param_names.front() == "ar.L1");
  CHECK(f.param_names.back() == "sigma2");
}

TEST_CASE("white noise with no ARMA terms") {
  auto y = testutil::gaussian(400, 3, 2.0);
  for (auto& v : y) v += 5.0;
  const auto f = sarimax::fit(y, spec(0, 0, 0, 0, 1));
  const auto s = summary_stats(y);
  CHECK(f.intercept == doctest::Approx(s.mean).epsilon(1e-6));
  const double pop_var = s.std_dev * s.std_dev * (y.size() - 1) / y.size();
  CHECK(f.sigma2 == doctest::Approx(pop_var).epsilon(1e-4));
  for (double v : sarimax::forecast(f, 5).values) CHECK(v == doctest::Approx(f.intercept));
}

TEST_CASE("AR(1) geometric forecast decay") {
  sarimax::SarimaxFit f;
  f.spec = spec(1, 0, 0, 0, 1);
  f.ar = {0.5};
  f.intercept = 0.0;
  f.e_history = {1.0, 4.0};
  f.eps_history = {0.0, 0.0};
  const auto v = sarimax::forecast(f, 4).values;
  CHECK(v == std::vector<double>{2, 1, 0.5, 0.25});
}

TEST_CASE("seasonal AR forecast matches an independent recursion") {
  sarimax::SarimaxParams p;
  p.ar = {0.5};
  p.sar = {0.4};
  p.intercept = 3.0;
  const auto sp = spec(1, 0, 1, 0, 8);
  const auto y = sarimax::simulate(sp, p, 800, 12);
  const auto f = sarimax::fit(y, sp);
  const auto got = sarimax::forecast(f, 8).values;
  const auto want = oracle::sar_forecast(y.values(), f.intercept, f.ar[0], f.sar[0], 8, 8);
  for (int k = 0; k < 8; ++k) CHECK(std::abs(got[k] - want[k]) < 1e-10);
}

TEST_CASE("simulation") {
  sarimax::SarimaxParams p;
  const auto a = sarimax::simulate(spec(0, 0, 0, 0, 1), p, 5000, 5);
  const auto s = summary_stats(a);
  CHECK(s.std_dev * s.std_dev > 0.9);
  CHECK(s.std_dev * s.std_dev < 1.1);
  const auto b = sarimax::simulate(spec(0, 0, 0, 0, 1), p, 5000, 5);
  CHECK(a.vector() == b.vector());
  p.ar = {0.9};
  const auto c = sarimax::simulate(spec(1, 0, 0, 0, 1), p, 10000, 6);
  const double r1 = acf(c.values(), 1)[1];
  CHECK(r1 > 0.87);
  CHECK(r1 < 0.93);
  p.ar = {1.1};
  CHECK_THROWS_AS(sarimax::simulate(spec(1, 0, 0, 0, 1), p, 100, 1), InvalidArgument);
}

TEST_CASE("bic definition and nested comparison") {
  sarimax::SarimaxParams p;
  p.ar = {0.6};
  const auto y = sarimax::simulate(spec(1, 0, 0, 0, 1), p, 600, 9);
  const auto f = sarimax::fit(y, spec(1, 0, 0, 0, 1));
  const double n_eff = static_cast<double>(f.n_obs - static_cast<std::size_t>(f.spec.burn_in()));
  CHECK(sarimax::bic_of(f) == doctest::Approx(-2 * f.loglik + f.n_params() * std::log(n_eff)));
  CHECK(sarimax::bic_of(f) == sarimax::bic_of(sarimax::fit(y, spec(1, 0, 0, 0, 1))));

  int wins = 0;
  for (int seed = 0; seed < 20; ++seed) {
    const auto ys = sarimax::simulate(spec(1, 0, 0, 0, 1), p, 500, 200 + seed);
    FeatureMatrix noise({"n1", "n2", "n3"});
    const auto z = testutil::gaussian(1500, 300 + seed);
    for (std::size_t i = 0; i < 500; ++i) noise.append_row(i, std::span<const double>(&z[3 * i], 3));
    const auto small = sarimax::fit(ys, spec(1, 0, 0, 0, 1));
    const auto big = sarimax::fit(ys, spec(3, 0, 0, 0, 1), noise);
    wins += small.bic < big.bic;
  }
  CHECK(wins >= 16);
}

TEST_CASE("refilter and extend agree with the fitted state") {
  sarimax::SarimaxParams p;
  p.ar = {0.3};
  p.ma = {0.4};
  const auto sp = spec(1, 1, 0, 0, 1);
  const auto y = sarimax::simulate(sp, p, 400, 31);
  const auto f = sarimax::fit(y, sp);
  const auto g = sarimax::refilter(f, y.values());
  for (std::size_t t = 0; t < y.size(); ++t) CHECK(g.eps_history[t] == doctest::Approx(f.eps_history[t]));
  auto h = sarimax::refilter(f, y.values().first(399));
  sarimax::extend(h, y[399]);
  CHECK(sarimax::forecast(h, 3).values == sarimax::forecast(g, 3).values);
  CHECK(sarimax::in_sample_predictions(f, y.values()).size() == y.size() - 1);
}

TEST_CASE("stationarity transform") {
  const std::vector<double> u{0.3, -2.0, 5.0};
  const auto c = sarimax::constrain_stationary(u);
  CHECK(sarimax::is_stationary(c));
  const auto back = sarimax::unconstrain_stationary(c);
  for (int i = 0; i < 3; ++i) CHECK(back[i] == doctest::Approx(u[i]).epsilon(1e-8));
  CHECK_FALSE(sarimax::is_stationary(std::vector<double>{1.2}));
}

TEST_CASE("errors") {
  const auto y = testutil::gaussian(300, 4);
  CHECK_THROWS_AS(sarimax::fit(std::span<const double>(y).first(30), spec(4, 0, 1, 1, 8)), InvalidArgument);
  CHECK_THROWS_AS(sarimax::fit(y, spec(1, 0, 0, 0, 1), column("c", std::vector<double>(300, 1.0))), NumericalError);
  const auto x = testutil::gaussian(300, 5);
  FeatureMatrix dup({"a", "b"});
  for (std::size_t i = 0; i < 300; ++i) {
    const double row[2] = {x[i], 2 * x[i]};
    dup.append_row(i, row);
  }
  CHECK_THROWS_AS(sarimax::fit(y, spec(1, 0, 0, 0, 1), dup), NumericalError);
  const auto j = sarimax::to_json(sarimax::fit(y, spec(1, 0, 0, 0, 1)));
  CHECK(j.contains("coefficients"));
  CHECK(j["spec"] == "(1,0,0)(0,0,0)_1");
}
