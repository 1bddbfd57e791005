#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oeecast/feature_matrix.hpp"
#include "oeecast/forecasters.hpp"
#include "oeecast/series.hpp"

namespace oeecast::sarimax {

/// (p,d,q)(P,D,Q)_s orders. Only d = D = 0 is estimable; orders are bounded
/// by 8.
struct SarimaxSpec {
  int p = 0, d = 0, q = 0;
  int P = 0, D = 0, Q = 0;
  int s = 1;
  std::size_t n_exog = 0;

  int ar_lags() const noexcept { return p + s * P; }
  int ma_lags() const noexcept { return q + s * Q; }
  /// Observations consumed before the conditional likelihood starts.
  int burn_in() const noexcept { return ar_lags() > ma_lags() ? ar_lags() : ma_lags(); }
  std::size_t n_arma() const noexcept { return static_cast<std::size_t>(p + q + P + Q); }
  void validate() const;
  std::string label() const;  // "(4,0,0)(1,0,1)_8"
};

/// Parses "p,d,q,P,D,Q,s" or the label form "(p,d,q)(P,D,Q)_s".
SarimaxSpec parse_spec(const std::string& text);

/// Parameters for simulation. exog_beta is in raw (unstandardized) units.
struct SarimaxParams {
  std::vector<double> ar, ma, sar, sma;
  std::vector<double> exog_beta;
  double intercept = 0.0;
  double sigma2 = 1.0;
};

struct FitOptions {
  int restarts = 3;
  int max_iterations = 5000;
  double tolerance = 1e-8;
  std::uint64_t seed = 0;
  bool intercept = true;
  bool compute_stderr = true;
  double max_condition = 1e10;
};

struct ExogScaling {
  std::vector<double> mean;
  std::vector<double> scale;
};

/**
 * Estimated seasonal ARMA with regression errors:
 *
 *   y_t = intercept + z_t . beta + e_t,   phi(B) Phi(B^s) e_t = theta(B) Theta(B^s) eps_t
 *
 * where z_t are the exogenous columns z-scored on the training span; beta is
 * therefore reported in standardized units (see exog_beta_raw()).
 */
struct SarimaxFit {
  SarimaxSpec spec;
  std::vector<double> ar, ma, sar, sma;
  std::vector<double> exog_beta;
  double intercept = 0.0;
  double sigma2 = 1.0;
  bool has_intercept = true;

  // Coefficient table: ARMA terms, intercept, exog, sigma2 (in that order).
  std::vector<std::string> param_names;
  std::vector<double> estimates;
  std::vector<double> stderrs;   // NaN when unavailable
  std::vector<double> p_values;  // 1 when unavailable
  bool stderr_available = false;

  double loglik = 0.0;
  double initial_loglik = 0.0;  // at the Hannan-Rissanen start
  double bic = 0.0;
  std::size_t n_obs = 0;
  std::vector<double> residuals;  // eps_t for t >= burn-in
  bool converged = false;
  int iterations = 0;

  std::vector<std::string> exog_names;
  ExogScaling scaling;

  // Filter state over the observed history (length = history length).
  std::vector<double> e_history;
  std::vector<double> eps_history;

  std::size_t n_params() const;  // everything estimated, sigma2 included
  std::vector<double> exog_p_values() const;
  std::vector<double> exog_stderr() const;
  std::vector<double> exog_beta_raw() const;
};

/// Conditional-Gaussian maximum likelihood. `exog` must have one row per
/// observation (or no columns at all).
SarimaxFit fit(std::span<const double> y, const SarimaxSpec& spec,
               const FeatureMatrix& exog = {}, const FitOptions& options = {});
inline SarimaxFit fit(const TimeSeries& ts, const SarimaxSpec& spec,
                      const FeatureMatrix& exog = {}, const FitOptions& options = {}) {
  return fit(ts.values(), spec, exog, options);
}

/// Concentrated conditional log-likelihood of fixed ARMA coefficients, with
/// the intercept and exogenous coefficients profiled out by least squares.
double profile_loglik(std::span<const double> y, const SarimaxSpec& spec,
                      const FeatureMatrix& exog, const SarimaxParams& arma,
                      bool intercept = true);

/// Recursive mean forecast; unknown future innovations are zero.
ForecastResult forecast(const SarimaxFit& fit, std::size_t horizon,
                        const FeatureMatrix& exog_future = {});

/// Same parameters, filter state rebuilt from a new history.
SarimaxFit refilter(const SarimaxFit& fit, std::span<const double> y,
                    const FeatureMatrix& exog = {});

/// Appends one observation to the filter state.
void extend(SarimaxFit& fit, double y, std::span<const double> exog_row = {});

/// One-step in-sample predictions y_t - eps_t for every t >= burn-in.
std::vector<double> in_sample_predictions(const SarimaxFit& fit, std::span<const double> y);

/// Gaussian simulation with 200 discarded burn-in steps.
TimeSeries simulate(const SarimaxSpec& spec, const SarimaxParams& params, std::size_t n,
                    std::uint64_t seed, const FeatureMatrix& exog = {});

double bic_of(const SarimaxFit& fit);

/// True when 1 - sum c_i B^i has all roots outside the unit circle.
bool is_stationary(std::span<const double> coefficients);

/// Maps unconstrained values to stationary AR coefficients through tanh
/// partial autocorrelations, and back.
std::vector<double> constrain_stationary(std::span<const double> unconstrained);
std::vector<double> unconstrain_stationary(std::span<const double> coefficients);

nlohmann::json to_json(const SarimaxFit& fit);

}  // namespace oeecast::sarimax
